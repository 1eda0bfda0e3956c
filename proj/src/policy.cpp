#include "rissim/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

#include "rissim/errors.hpp"
#include "rissim/propagation.hpp"

namespace rissim {

namespace {

bool requirement_met(ReceiverRole role, double power_dbm, double threshold_dbm) {
  return role == ReceiverRole::Interfered ? power_dbm < threshold_dbm : power_dbm >= threshold_dbm;
}

void check_report(const ProbeReport& report, std::size_t n_receivers) {
  if (report.angles.empty() || report.power_dbm.rows() != static_cast<Eigen::Index>(report.angles.size()) ||
      report.power_dbm.cols() != static_cast<Eigen::Index>(n_receivers)) {
    throw InvalidArgument("probe report does not match the angle/receiver sets");
  }
}

}  // namespace

Policy parse_policy(std::string_view spec) {
  if (spec == "periodic") return PeriodicPolicy{};
  if (spec == "context:all-best") return ContextAwarePolicy{ContextAwarePolicy::Mode::AllBest};
  if (spec == "context:minimal-cover") {
    return ContextAwarePolicy{ContextAwarePolicy::Mode::MinimalCover};
  }
  constexpr std::string_view kStatic = "static:";
  if (spec.starts_with(kStatic)) {
    const std::string_view num = spec.substr(kStatic.size());
    double angle = 0.0;
    const auto [end, ec] = std::from_chars(num.data(), num.data() + num.size(), angle);
    if (ec == std::errc{} && end == num.data() + num.size() && !num.empty() && std::isfinite(angle)) {
      return StaticPolicy{angle};
    }
  }
  throw InvalidArgument("unknown policy '" + std::string(spec) +
                        "' (expected static:<angle>, periodic, context:all-best or "
                        "context:minimal-cover)");
}

std::string format_angle(double angle_deg) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", angle_deg);
  return buf;
}

std::string to_string(const Policy& policy) {
  struct Visitor {
    std::string operator()(const StaticPolicy& p) const { return "static:" + format_angle(p.angle_deg); }
    std::string operator()(const PeriodicPolicy&) const { return "periodic"; }
    std::string operator()(const ContextAwarePolicy& p) const {
      return p.mode == ContextAwarePolicy::Mode::AllBest ? "context:all-best"
                                                         : "context:minimal-cover";
    }
  };
  return std::visit(Visitor{}, policy);
}

double best_angle_for(const ProbeReport& report, Eigen::Index column, ReceiverRole role) {
  const bool minimize = role == ReceiverRole::Interfered;
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.angles.size(); ++i) {
    const double v = report.power_dbm(static_cast<Eigen::Index>(i), column);
    const double b = report.power_dbm(static_cast<Eigen::Index>(best), column);
    const bool better = minimize ? v < b : v > b;
    if (better) {
      best = i;
    } else if (v == b) {
      const double ai = report.angles[i];
      const double ab = report.angles[best];
      if (std::abs(ai) < std::abs(ab) || (std::abs(ai) == std::abs(ab) && ai < ab)) best = i;
    }
  }
  return report.angles[best];
}

std::vector<ReceiverChoice> select_best_angles(const ProbeReport& report,
                                               std::span<const Receiver> receivers) {
  check_report(report, receivers.size());
  std::vector<ReceiverChoice> out;
  for (std::size_t j = 0; j < receivers.size(); ++j) {
    out.push_back(
        {receivers[j].name, best_angle_for(report, static_cast<Eigen::Index>(j), receivers[j].role)});
  }
  return out;
}

std::vector<double> best_angle_set(const ProbeReport& report, std::span<const Receiver> receivers) {
  std::vector<double> set;
  for (const auto& choice : select_best_angles(report, receivers)) set.push_back(choice.angle_deg);
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

AngleCover minimal_angle_cover(const ProbeReport& report, std::span<const Receiver> receivers) {
  check_report(report, receivers.size());
  const std::size_t n = report.angles.size();

  // ok(i, j): receiver j's requirement holds at angle row i.
  std::vector<std::vector<bool>> ok(n, std::vector<bool>(receivers.size()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < receivers.size(); ++j) {
      ok[i][j] = requirement_met(receivers[j].role,
                                 report.power_dbm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                 receivers[j].threshold_dbm);
    }
  }
  const auto feasible = [&](const std::vector<std::size_t>& subset) {
    for (std::size_t j = 0; j < receivers.size(); ++j) {
      const bool interfered = receivers[j].role == ReceiverRole::Interfered;
      bool any = false;
      bool all = true;
      for (std::size_t i : subset) {
        any = any || ok[i][j];
        all = all && ok[i][j];
      }
      if (interfered ? !all : !any) return false;
    }
    return true;
  };

  // Angles are strictly increasing, so index-lexicographic combination order
  // is also angle-lexicographic.
  std::vector<std::size_t> idx;
  for (std::size_t k = 1; k <= n; ++k) {
    idx.resize(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      if (feasible(idx)) {
        AngleCover cover;
        for (std::size_t i : idx) cover.angles.push_back(report.angles[i]);
        return cover;
      }
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return {best_angle_set(report, receivers), false};
}

int probe_slots(const Policy& policy, std::size_t n_angles, const TimelineConfig& timeline) {
  if (!std::holds_alternative<ContextAwarePolicy>(policy)) return 0;
  return static_cast<int>(n_angles) * timeline.probe_dwell;
}

double angle_for_slot(const Policy& policy, int slot, std::span<const double> allowed_angles,
                      const TimelineConfig& timeline, const ScheduleState& state) {
  if (slot < 0) throw InvalidArgument("slot must be >= 0");
  if (allowed_angles.empty()) throw InvalidArgument("allowed angle set is empty");
  const auto n = static_cast<int>(allowed_angles.size());

  if (const auto* s = std::get_if<StaticPolicy>(&policy)) return s->angle_deg;
  if (std::holds_alternative<PeriodicPolicy>(policy)) {
    return allowed_angles[(slot / timeline.dwell_slots) % n];
  }
  const int probe_len = n * timeline.probe_dwell;
  if (slot < probe_len) return allowed_angles[slot / timeline.probe_dwell];
  if (state.selected.empty()) {
    throw InvalidArgument("context-aware exploit phase reached before an angle set was selected");
  }
  const int k = static_cast<int>(state.selected.size());
  return state.selected[((slot - probe_len) / timeline.dwell_slots) % k];
}

std::optional<std::size_t> SimulationTrace::column(std::string_view receiver) const {
  for (std::size_t i = 0; i < receivers.size(); ++i) {
    if (receivers[i] == receiver) return i;
  }
  return std::nullopt;
}

std::vector<double> SimulationTrace::samples(std::string_view receiver) const {
  const auto col = column(receiver);
  if (!col) throw UnknownReceiver(std::string(receiver));
  std::vector<double> out;
  out.reserve(slots.size());
  for (const auto& s : slots) out.push_back(s.power_dbm[*col]);
  return out;
}

SimulationTrace SimulationTrace::slice(int begin, int end) const {
  begin = std::clamp(begin, 0, static_cast<int>(slots.size()));
  end = std::clamp(end, begin, static_cast<int>(slots.size()));
  SimulationTrace out;
  out.receivers = receivers;
  out.selection = selection;
  out.probe_slots = std::clamp(probe_slots - begin, 0, end - begin);
  out.slots.assign(slots.begin() + begin, slots.begin() + end);
  return out;
}

namespace {

std::vector<double> powers_at(const Scene& scene, double angle, const PropagationParams& params) {
  const Scene configured = apply_ris_angle(scene, angle);
  const PathTracer tracer(configured.effective_walls(), configured.tx().position, params.max_order);
  std::vector<double> out;
  for (const auto& rx : scene.receivers()) {
    std::vector<double> gains;
    for (const auto& path : tracer.trace(rx.position)) {
      gains.push_back(path_gain_db(path, scene.tx().frequency_hz, params));
    }
    out.push_back(combine_power_dbm(scene.tx().power_dbm, gains, params));
  }
  return out;
}

}  // namespace

ProbeReport probe_all_angles(const Scene& scene, const PropagationParams& params) {
  params.validate();
  const auto& angles = scene.ris().allowed_angles;
  ProbeReport report{angles, Eigen::MatrixXd(static_cast<Eigen::Index>(angles.size()),
                                             static_cast<Eigen::Index>(scene.receivers().size()))};
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const auto row = powers_at(scene, angles[i], params);
    for (std::size_t j = 0; j < row.size(); ++j) {
      report.power_dbm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return report;
}

SimulationTrace run_simulation(const Scene& scene, const Policy& policy,
                               const TimelineConfig& timeline, const PropagationParams& params) {
  timeline.validate();
  params.validate();
  const auto& allowed = scene.ris().allowed_angles;
  if (const auto* s = std::get_if<StaticPolicy>(&policy); s && !scene.ris().allows(s->angle_deg)) {
    throw AngleNotAllowed(s->angle_deg);
  }
  const int probe_len = probe_slots(policy, allowed.size(), timeline);
  if (probe_len > timeline.total_slots) {
    throw InvalidArgument("timeline.total_slots (" + std::to_string(timeline.total_slots) +
                          ") is shorter than the probe phase (" + std::to_string(probe_len) +
                          " slots)");
  }

  // The scene is time-invariant, so each angle is traced once.
  std::map<double, std::vector<double>> cache;
  const auto powers = [&](double angle) -> const std::vector<double>& {
    auto it = cache.find(angle);
    if (it == cache.end()) it = cache.emplace(angle, powers_at(scene, angle, params)).first;
    return it->second;
  };

  SimulationTrace trace;
  for (const auto& rx : scene.receivers()) trace.receivers.push_back(rx.name);
  trace.probe_slots = probe_len;
  trace.slots.reserve(static_cast<std::size_t>(timeline.total_slots));

  const auto* context = std::get_if<ContextAwarePolicy>(&policy);
  for (int slot = 0; slot < timeline.total_slots; ++slot) {
    if (context && slot == probe_len) {
      // Build the report from what the receivers observed while probing.
      ProbeReport report{allowed, Eigen::MatrixXd(static_cast<Eigen::Index>(allowed.size()),
                                                  static_cast<Eigen::Index>(trace.receivers.size()))};
      for (std::size_t i = 0; i < allowed.size(); ++i) {
        const auto& rec = trace.slots[i * static_cast<std::size_t>(timeline.probe_dwell)];
        for (std::size_t j = 0; j < trace.receivers.size(); ++j) {
          report.power_dbm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rec.power_dbm[j];
        }
      }
      if (context->mode == ContextAwarePolicy::Mode::AllBest) {
        trace.selection = {best_angle_set(report, scene.receivers()), true};
      } else {
        const AngleCover cover = minimal_angle_cover(report, scene.receivers());
        trace.selection = {cover.angles, cover.feasible};
      }
    }
    const double angle = angle_for_slot(policy, slot, allowed, timeline, trace.selection);
    trace.slots.push_back({slot, angle, powers(angle)});
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
  out << "slot,angle_deg";
  for (const auto& name : trace.receivers) out << ',' << name;
  out << '\n';
  char buf[32];
  for (const auto& s : trace.slots) {
    out << s.slot << ',' << format_angle(s.angle_deg);
    for (double p : s.power_dbm) {
      std::snprintf(buf, sizeof buf, "%.2f", p);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace rissim
