#ifndef RISSIM_METRICS_HPP
#define RISSIM_METRICS_HPP

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rissim/policy.hpp"
#include "rissim/scene.hpp"

namespace rissim {

enum class Direction { AtLeast, Below };

struct Requirement {
  std::string receiver;
  Direction direction = Direction::AtLeast;
  double threshold_dbm = 0.0;

  /// Sensor and desired receivers need at least the threshold; interfered
  /// receivers need to stay below it.
  static Requirement for_receiver(const Receiver& rx);
};

/// Share of slots meeting the requirement. Throws UnknownReceiver.
double satisfaction_fraction(const SimulationTrace& trace, const Requirement& req);

/// Statistics are taken over dBm samples by default ("dB-domain mean");
/// Linear averages milliwatts and converts the mean back to dBm.
enum class MeanDomain { Db, Linear };

struct PowerStats {
  double mean = 0.0;
  double median = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

/// Nearest-rank percentile: sorted[ceil(q*N) - 1].
double nearest_rank(std::vector<double> samples, double q);

PowerStats power_stats(const SimulationTrace& trace, std::string_view receiver,
                       MeanDomain domain = MeanDomain::Db);

struct ReceiverMetrics {
  std::string name;
  ReceiverRole role = ReceiverRole::Desired;
  double threshold_dbm = 0.0;
  double satisfaction_fraction = 0.0;
  PowerStats stats;
};

struct MetricsReport {
  std::string scene_id;
  MeanDomain domain = MeanDomain::Db;
  std::vector<ReceiverMetrics> receivers;

  const ReceiverMetrics* find(std::string_view name) const;
};

MetricsReport make_report(const Scene& scene, const SimulationTrace& trace,
                          MeanDomain domain = MeanDomain::Db);

struct ReceiverDelta {
  std::string name;
  double satisfaction_fraction = 0.0;
  PowerStats stats;  // a - b, dB
};

struct DeltaReport {
  std::vector<ReceiverDelta> receivers;
  const ReceiverDelta* find(std::string_view name) const;
};

/// Per-receiver differences a - b. Throws ReceiverSetMismatch when the two
/// reports cover different receivers or different scenes.
DeltaReport compare_policies(const MetricsReport& a, const MetricsReport& b);

/// `receiver,statistic,value` with three decimals.
void write_metrics_csv(std::ostream& out, const MetricsReport& report);
/// Reads the statistics written by write_metrics_csv (scene_id is not part of
/// the CSV and is left empty). Throws ParseError.
MetricsReport read_metrics_csv(std::istream& in);

void write_delta_csv(std::ostream& out, const DeltaReport& delta);
void write_delta_table(std::ostream& out, const DeltaReport& delta);

/// Human-readable summary; fractions as percentages with two decimals.
void write_summary(std::ostream& out, const Scene& scene, const Policy& policy,
                   const SimulationTrace& trace, const MetricsReport& report);

}  // namespace rissim

#endif  // RISSIM_METRICS_HPP
