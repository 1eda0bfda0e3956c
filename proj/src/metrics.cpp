#include "rissim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "rissim/errors.hpp"

namespace rissim {

Requirement Requirement::for_receiver(const Receiver& rx) {
  return {rx.name, rx.role == ReceiverRole::Interfered ? Direction::Below : Direction::AtLeast,
          rx.threshold_dbm};
}

double satisfaction_fraction(const SimulationTrace& trace, const Requirement& req) {
  const std::vector<double> samples = trace.samples(req.receiver);
  if (samples.empty()) return 0.0;
  const auto met = std::count_if(samples.begin(), samples.end(), [&](double p) {
    return req.direction == Direction::AtLeast ? p >= req.threshold_dbm : p < req.threshold_dbm;
  });
  return static_cast<double>(met) / static_cast<double>(samples.size());
}

double nearest_rank(std::vector<double> samples, double q) {
  if (samples.empty()) throw InvalidArgument("percentile of an empty sample set");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  // The small offset keeps exact products such as 0.5 * 4 from rounding up.
  auto rank = static_cast<long>(std::ceil(q * n - 1e-9));
  rank = std::clamp<long>(rank, 1, static_cast<long>(samples.size()));
  return samples[static_cast<std::size_t>(rank - 1)];
}

PowerStats power_stats(const SimulationTrace& trace, std::string_view receiver, MeanDomain domain) {
  const std::vector<double> samples = trace.samples(receiver);
  if (samples.empty()) throw InvalidArgument("power statistics need at least one slot");
  PowerStats s;
  if (domain == MeanDomain::Db) {
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  } else {
    double mw = 0.0;
    for (double p : samples) mw += std::pow(10.0, p / 10.0);
    s.mean = 10.0 * std::log10(mw / static_cast<double>(samples.size()));
  }
  s.median = nearest_rank(samples, 0.5);
  s.p10 = nearest_rank(samples, 0.1);
  s.p90 = nearest_rank(samples, 0.9);
  return s;
}

const ReceiverMetrics* MetricsReport::find(std::string_view name) const {
  for (const auto& r : receivers) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const ReceiverDelta* DeltaReport::find(std::string_view name) const {
  for (const auto& r : receivers) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

MetricsReport make_report(const Scene& scene, const SimulationTrace& trace, MeanDomain domain) {
  MetricsReport report;
  report.scene_id = scene_fingerprint(scene);
  report.domain = domain;
  for (const auto& rx : scene.receivers()) {
    ReceiverMetrics m;
    m.name = rx.name;
    m.role = rx.role;
    m.threshold_dbm = rx.threshold_dbm;
    m.satisfaction_fraction = satisfaction_fraction(trace, Requirement::for_receiver(rx));
    m.stats = power_stats(trace, rx.name, domain);
    report.receivers.push_back(std::move(m));
  }
  return report;
}

DeltaReport compare_policies(const MetricsReport& a, const MetricsReport& b) {
  if (!a.scene_id.empty() && !b.scene_id.empty() && a.scene_id != b.scene_id) {
    throw ReceiverSetMismatch("reports come from different scenes (" + a.scene_id + " vs " +
                              b.scene_id + ")");
  }
  std::set<std::string> names_a;
  std::set<std::string> names_b;
  for (const auto& r : a.receivers) names_a.insert(r.name);
  for (const auto& r : b.receivers) names_b.insert(r.name);
  if (names_a != names_b || names_a.size() != a.receivers.size() ||
      names_b.size() != b.receivers.size()) {
    throw ReceiverSetMismatch("reports cover different receiver sets");
  }
  DeltaReport delta;
  for (const auto& ra : a.receivers) {
    const ReceiverMetrics& rb = *b.find(ra.name);
    delta.receivers.push_back({ra.name,
                               ra.satisfaction_fraction - rb.satisfaction_fraction,
                               {ra.stats.mean - rb.stats.mean, ra.stats.median - rb.stats.median,
                                ra.stats.p10 - rb.stats.p10, ra.stats.p90 - rb.stats.p90}});
  }
  return delta;
}

namespace {

std::string fixed(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

constexpr const char* kStatNames[] = {"satisfaction_fraction", "mean", "median", "p10", "p90"};

void write_rows(std::ostream& out, const std::string& name, double fraction, const PowerStats& s) {
  const double values[] = {fraction, s.mean, s.median, s.p10, s.p90};
  for (std::size_t i = 0; i < std::size(values); ++i) {
    out << name << ',' << kStatNames[i] << ',' << fixed(values[i], 3) << '\n';
  }
}

}  // namespace

void write_metrics_csv(std::ostream& out, const MetricsReport& report) {
  out << "receiver,statistic,value\n";
  for (const auto& r : report.receivers) write_rows(out, r.name, r.satisfaction_fraction, r.stats);
}

MetricsReport read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "receiver,statistic,value") {
    throw ParseError("metrics CSV: missing 'receiver,statistic,value' header");
  }
  MetricsReport report;
  std::map<std::string, std::size_t> index;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw ParseError("metrics CSV line " + std::to_string(line_no) + ": expected 3 fields");
    }
    const std::string name = line.substr(0, c1);
    const std::string stat = line.substr(c1 + 1, c2 - c1 - 1);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(line.substr(c2 + 1), &used);
      if (used != line.size() - c2 - 1) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw ParseError("metrics CSV line " + std::to_string(line_no) + ": bad value");
    }
    auto [it, inserted] = index.emplace(name, report.receivers.size());
    if (inserted) {
      ReceiverMetrics fresh;
      fresh.name = name;
      report.receivers.push_back(std::move(fresh));
    }
    ReceiverMetrics& m = report.receivers[it->second];
    if (stat == "satisfaction_fraction") {
      m.satisfaction_fraction = value;
    } else if (stat == "mean") {
      m.stats.mean = value;
    } else if (stat == "median") {
      m.stats.median = value;
    } else if (stat == "p10") {
      m.stats.p10 = value;
    } else if (stat == "p90") {
      m.stats.p90 = value;
    } else {
      throw ParseError("metrics CSV line " + std::to_string(line_no) + ": unknown statistic '" +
                       stat + "'");
    }
  }
  return report;
}

void write_delta_csv(std::ostream& out, const DeltaReport& delta) {
  out << "receiver,statistic,value\n";
  for (const auto& r : delta.receivers) write_rows(out, r.name, r.satisfaction_fraction, r.stats);
}

void write_delta_table(std::ostream& out, const DeltaReport& delta) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %12s %10s %10s %10s %10s\n", "receiver", "satisfied",
                "mean", "median", "p10", "p90");
  out << buf;
  for (const auto& r : delta.receivers) {
    std::snprintf(buf, sizeof buf, "%-10s %11.2f%% %10.3f %10.3f %10.3f %10.3f\n", r.name.c_str(),
                  100.0 * r.satisfaction_fraction, r.stats.mean, r.stats.median, r.stats.p10,
                  r.stats.p90);
    out << buf;
  }
}

void write_summary(std::ostream& out, const Scene& scene, const Policy& policy,
                   const SimulationTrace& trace, const MetricsReport& report) {
  out << "scene " << report.scene_id << '\n';
  out << "policy " << to_string(policy) << '\n';
  out << "slots " << trace.slots.size() << " (probe " << trace.probe_slots << ")\n";
  if (std::holds_alternative<ContextAwarePolicy>(policy)) {
    out << "selected angles:";
    for (double a : trace.selection.selected) out << ' ' << format_angle(a);
    out << (trace.selection.feasible ? "" : " (INFEASIBLE)") << '\n';
  }
  out << "statistics: "
      << (report.domain == MeanDomain::Db ? "dB-domain mean (average of dBm samples)"
                                          : "linear-domain mean (average of mW, in dBm)")
      << ", nearest-rank percentiles\n";
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-10s %-10s %10s %10s %10s %10s %10s %10s\n", "receiver", "role",
                "threshold", "satisfied", "mean", "median", "p10", "p90");
  out << buf;
  for (const auto& r : report.receivers) {
    const Receiver* rx = scene.find_receiver(r.name);
    std::snprintf(buf, sizeof buf, "%-10s %-10s %10.2f %9.2f%% %10.3f %10.3f %10.3f %10.3f\n",
                  r.name.c_str(), std::string(to_string(rx ? rx->role : r.role)).c_str(),
                  r.threshold_dbm, 100.0 * r.satisfaction_fraction, r.stats.mean, r.stats.median,
                  r.stats.p10, r.stats.p90);
    out << buf;
  }
}

}  // namespace rissim
