#ifndef RISSIM_POLICY_HPP
#define RISSIM_POLICY_HPP

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rissim/config.hpp"
#include "rissim/scene.hpp"

namespace rissim {

// RIS control policies ------------------------------------------------------

/// RIS held at one angle for the whole run. Static at 0 degrees is the
/// "plain wall" baseline.
struct StaticPolicy {
  double angle_deg = 0.0;
};

/// Blind sweep: each allowed angle in turn for dwell_slots slots, repeating.
struct PeriodicPolicy {};

/// Probe every angle once, then alternate over an angle set chosen from the
/// receivers' reports.
struct ContextAwarePolicy {
  enum class Mode { AllBest, MinimalCover };
  Mode mode = Mode::AllBest;
};

using Policy = std::variant<StaticPolicy, PeriodicPolicy, ContextAwarePolicy>;

/// Parses `static:<angle>`, `periodic`, `context:all-best`,
/// `context:minimal-cover`. Throws InvalidArgument otherwise.
Policy parse_policy(std::string_view spec);
std::string to_string(const Policy& policy);

// Probe reports and angle selection ------------------------------------------

/// Received power for each (allowed angle, receiver) pair, rows ordered as
/// allowed_angles and columns as receivers.
struct ProbeReport {
  std::vector<double> angles;
  Eigen::MatrixXd power_dbm;
};

/// Angle the receiver reports as best: highest power for sensor/desired,
/// lowest for interfered. Ties go to the angle closest to 0, then the
/// smaller angle.
double best_angle_for(const ProbeReport& report, Eigen::Index column, ReceiverRole role);

struct ReceiverChoice {
  std::string receiver;
  double angle_deg;
};

std::vector<ReceiverChoice> select_best_angles(const ProbeReport& report,
                                               std::span<const Receiver> receivers);

/// Distinct best angles, ascending.
std::vector<double> best_angle_set(const ProbeReport& report, std::span<const Receiver> receivers);

struct AngleCover {
  std::vector<double> angles;  // ascending
  bool feasible = true;
};

/// Smallest angle subset that meets every receiver's requirement: each
/// sensor/desired receiver at or above threshold at one angle at least, and
/// each interfered receiver below threshold at every angle. Equal-size
/// candidates are ranked lexicographically. When no subset works, returns the
/// best-angle set with feasible = false.
AngleCover minimal_angle_cover(const ProbeReport& report, std::span<const Receiver> receivers);

// Slotted simulation --------------------------------------------------------

/// Selection made at the probe/exploit boundary of a context-aware run.
struct ScheduleState {
  std::vector<double> selected;
  bool feasible = true;
};

int probe_slots(const Policy& policy, std::size_t n_angles, const TimelineConfig& timeline);

/// Angle applied in `slot`. For context-aware policies in the exploit phase
/// `state.selected` must already hold the selection.
double angle_for_slot(const Policy& policy, int slot, std::span<const double> allowed_angles,
                      const TimelineConfig& timeline, const ScheduleState& state);

struct SlotRecord {
  int slot = 0;
  double angle_deg = 0.0;
  std::vector<double> power_dbm;  // one per receiver, in trace order
};

struct SimulationTrace {
  std::vector<std::string> receivers;
  std::vector<SlotRecord> slots;
  int probe_slots = 0;  // leading slots spent probing (context-aware only)
  ScheduleState selection;

  std::optional<std::size_t> column(std::string_view receiver) const;
  std::vector<double> samples(std::string_view receiver) const;
  /// Slots [begin, end) as a standalone trace.
  SimulationTrace slice(int begin, int end) const;
};

SimulationTrace run_simulation(const Scene& scene, const Policy& policy,
                               const TimelineConfig& timeline, const PropagationParams& params);

/// Per-angle received power for every receiver of the scene.
ProbeReport probe_all_angles(const Scene& scene, const PropagationParams& params);

/// `slot,angle_deg,<receivers...>`, powers with two decimals.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);

std::string format_angle(double angle_deg);

}  // namespace rissim

#endif  // RISSIM_POLICY_HPP
