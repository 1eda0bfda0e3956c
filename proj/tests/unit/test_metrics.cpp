#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rissim/errors.hpp"
#include "rissim/metrics.hpp"
#include "support/generators.hpp"

using namespace rissim;
using rissim::testing::Rng;

namespace {

SimulationTrace trace_of(const std::vector<double>& samples, const std::string& name = "X") {
  SimulationTrace t;
  t.receivers = {name};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    t.slots.push_back({static_cast<int>(i), 0.0, {samples[i]}});
  }
  return t;
}

MetricsReport report_with(std::vector<std::pair<std::string, double>> means) {
  MetricsReport r;
  r.scene_id = "s";
  for (auto& [name, mean] : means) {
    ReceiverMetrics m;
    m.name = name;
    m.satisfaction_fraction = 0.5;
    m.stats = {mean, mean, mean - 5.0, mean + 5.0};
    r.receivers.push_back(m);
  }
  return r;
}

}  // namespace

TEST_CASE("satisfaction fraction") {
  const SimulationTrace t = trace_of({-90, -60, -60, -90});
  CHECK(satisfaction_fraction(t, {"X", Direction::AtLeast, -70.0}) == 0.5);
  CHECK(satisfaction_fraction(t, {"X", Direction::AtLeast, -std::numeric_limits<double>::infinity()}) == 1.0);
  CHECK(satisfaction_fraction(t, {"X", Direction::Below, -60.0}) == 0.5);
  CHECK(satisfaction_fraction(t, {"X", Direction::AtLeast, -60.0}) == 0.5);
  CHECK_THROWS_AS(satisfaction_fraction(t, {"Y", Direction::AtLeast, 0.0}), UnknownReceiver);
}

TEST_CASE("requirement direction follows the role") {
  Receiver rx;
  rx.name = "C";
  rx.role = ReceiverRole::Interfered;
  rx.threshold_dbm = -85.0;
  CHECK(Requirement::for_receiver(rx).direction == Direction::Below);
  rx.role = ReceiverRole::Sensor;
  CHECK(Requirement::for_receiver(rx).direction == Direction::AtLeast);
}

TEST_CASE("canonical static run: sensor A never detects") {
  const Scene s = canonical_scene();
  const SimulationTrace t = run_simulation(s, StaticPolicy{0.0}, TimelineConfig{}, PropagationParams{});
  CHECK(satisfaction_fraction(t, Requirement::for_receiver(*s.find_receiver("A"))) == 0.0);
}

TEST_CASE("power statistics, nearest rank") {
  const PowerStats st = power_stats(trace_of({-80, -70, -60, -50}), "X");
  CHECK(st.median == -70.0);
  CHECK(st.p90 == -50.0);
  CHECK(st.p10 == -80.0);
  CHECK(st.mean == doctest::Approx(-65.0));
  CHECK(nearest_rank({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(nearest_rank({1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0}, 0.9) == 9.0);
}

TEST_CASE("constant samples collapse every statistic") {
  for (auto domain : {MeanDomain::Db, MeanDomain::Linear}) {
    const PowerStats st = power_stats(trace_of({-77.5, -77.5, -77.5}), "X", domain);
    CHECK(st.mean == doctest::Approx(-77.5).epsilon(1e-12));
    CHECK(st.median == -77.5);
    CHECK(st.p10 == -77.5);
    CHECK(st.p90 == -77.5);
  }
}

TEST_CASE("linear-domain mean averages milliwatts") {
  const PowerStats st = power_stats(trace_of({-60.0, -70.0}), "X", MeanDomain::Linear);
  CHECK(st.mean == doctest::Approx(10.0 * std::log10((1e-6 + 1e-7) / 2.0)));
  CHECK(power_stats(trace_of({-60.0, -70.0}), "X").mean == -65.0);
}

TEST_CASE("compare: identical, shifted, mismatched") {
  const MetricsReport a = report_with({{"A", -70.0}, {"B", -80.0}});
  const DeltaReport same = compare_policies(a, a);
  for (const auto& d : same.receivers) {
    CHECK(d.satisfaction_fraction == 0.0);
    CHECK(d.stats.mean == 0.0);
    CHECK(d.stats.median == 0.0);
    CHECK(d.stats.p10 == 0.0);
    CHECK(d.stats.p90 == 0.0);
  }
  const MetricsReport b = report_with({{"A", -60.0}, {"B", -80.0}});
  CHECK(compare_policies(a, b).find("A")->stats.mean == -10.0);

  CHECK_THROWS_AS(compare_policies(a, report_with({{"A", -60.0}})), ReceiverSetMismatch);
  MetricsReport other_scene = a;
  other_scene.scene_id = "t";
  CHECK_THROWS_AS(compare_policies(a, other_scene), ReceiverSetMismatch);
}

TEST_CASE("canonical: context-aware lowers interference at C; periodic p90 dominates cover p90") {
  const Scene s = canonical_scene();
  const PropagationParams params;
  const TimelineConfig t;
  const auto stat = make_report(s, run_simulation(s, StaticPolicy{0.0}, t, params));
  const auto ctx = make_report(
      s, run_simulation(s, ContextAwarePolicy{ContextAwarePolicy::Mode::MinimalCover}, t, params));
  const auto per = make_report(s, run_simulation(s, PeriodicPolicy{}, t, params));
  CHECK(compare_policies(ctx, stat).find("C")->stats.mean < 0.0);
  CHECK(per.find("C")->stats.p90 >= ctx.find("C")->stats.p90);
  CHECK(stat.scene_id == scene_fingerprint(s));
}

TEST_CASE("property: fraction is monotone in the threshold") {
  Rng rng(401);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<double> v(static_cast<std::size_t>(testing::uniform_int(rng, 1, 60)));
    for (double& x : v) x = testing::uniform(rng, -120.0, -40.0);
    const SimulationTrace t = trace_of(v);
    const double lo = testing::uniform(rng, -130.0, -30.0);
    const double hi = lo + testing::uniform(rng, 0.0, 30.0);
    const double f_lo = satisfaction_fraction(t, {"X", Direction::AtLeast, lo});
    const double f_hi = satisfaction_fraction(t, {"X", Direction::AtLeast, hi});
    CHECK(f_hi <= f_lo);
    CHECK(f_lo >= 0.0);
    CHECK(f_lo <= 1.0);
  }
}

TEST_CASE("property: statistics are permutation invariant and ordered") {
  Rng rng(402);
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<double> v(static_cast<std::size_t>(testing::uniform_int(rng, 1, 60)));
    for (double& x : v) x = std::round(testing::uniform(rng, -200.0, -40.0));
    const PowerStats a = power_stats(trace_of(v), "X");
    std::shuffle(v.begin(), v.end(), rng);
    const PowerStats b = power_stats(trace_of(v), "X");
    CHECK(a.median == b.median);
    CHECK(a.p10 == b.p10);
    CHECK(a.p90 == b.p90);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
    CHECK(a.p10 <= a.median);
    CHECK(a.median <= a.p90);
  }
}

TEST_CASE("metrics CSV round-trips at three decimals") {
  const Scene s = canonical_scene();
  const auto report = make_report(s, run_simulation(s, PeriodicPolicy{}, TimelineConfig{}, PropagationParams{}));
  std::ostringstream out;
  write_metrics_csv(out, report);
  CHECK(out.str().rfind("receiver,statistic,value\nA,satisfaction_fraction,", 0) == 0);
  std::istringstream in(out.str());
  const MetricsReport back = read_metrics_csv(in);
  REQUIRE(back.receivers.size() == report.receivers.size());
  for (std::size_t i = 0; i < back.receivers.size(); ++i) {
    CHECK(back.receivers[i].name == report.receivers[i].name);
    CHECK(back.receivers[i].stats.mean == doctest::Approx(report.receivers[i].stats.mean).epsilon(1e-5));
    CHECK(back.receivers[i].satisfaction_fraction ==
          doctest::Approx(report.receivers[i].satisfaction_fraction).epsilon(1e-3));
  }
  std::istringstream bad("receiver,statistic,value\nA,mean,notanumber\n");
  CHECK_THROWS_AS(read_metrics_csv(bad), ParseError);
}
