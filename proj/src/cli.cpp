#include "rissim/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rissim/errors.hpp"
#include "rissim/metrics.hpp"
#include "rissim/policy.hpp"
#include "rissim/propagation.hpp"
#include "rissim/scene.hpp"

namespace rissim::cli {

namespace fs = std::filesystem;

namespace {

/// Flags that override the scene file's propagation/timeline sections.
struct Overrides {
  std::optional<int> max_order;
  std::optional<double> reflection_loss_db;
  std::optional<std::string> summation;
  std::optional<double> noise_floor_dbm;
  std::optional<int> total_slots;
  std::optional<int> dwell_slots;
  std::optional<int> probe_dwell;
  std::vector<std::string> roles;  // NAME=ROLE[:THRESHOLD]

  void add_propagation(CLI::App& cmd) {
    cmd.add_option("--max-order", max_order, "Maximum reflection order (0-4)");
    cmd.add_option("--reflection-loss", reflection_loss_db, "Loss per bounce [dB]");
    cmd.add_option("--summation", summation, "power_sum or strongest_path");
    cmd.add_option("--noise-floor", noise_floor_dbm, "Noise floor [dBm]");
  }
  void add_timeline(CLI::App& cmd) {
    cmd.add_option("--slots", total_slots, "Total number of slots");
    cmd.add_option("--dwell", dwell_slots, "Slots per angle (periodic and exploit phases)");
    cmd.add_option("--probe-dwell", probe_dwell, "Slots per angle while probing");
    cmd.add_option("--role", roles, "Override a receiver role: NAME=ROLE[:THRESHOLD_DBM]");
  }

  void apply(RunDefaults& d) const {
    if (max_order) d.propagation.max_order = *max_order;
    if (reflection_loss_db) d.propagation.reflection_loss_db = *reflection_loss_db;
    if (noise_floor_dbm) d.propagation.noise_floor_dbm = *noise_floor_dbm;
    if (summation) {
      if (*summation == "power_sum") {
        d.propagation.summation = Summation::PowerSum;
      } else if (*summation == "strongest_path") {
        d.propagation.summation = Summation::StrongestPath;
      } else {
        throw InvalidArgument("--summation must be power_sum or strongest_path");
      }
    }
    if (total_slots) d.timeline.total_slots = *total_slots;
    if (dwell_slots) d.timeline.dwell_slots = *dwell_slots;
    if (probe_dwell) d.timeline.probe_dwell = *probe_dwell;
    d.propagation.validate();
    d.timeline.validate();
  }

  Scene apply_roles(Scene scene) const {
    for (const auto& spec : roles) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw InvalidArgument("--role expects NAME=ROLE[:THRESHOLD_DBM], got '" + spec + "'");
      }
      const std::string name = spec.substr(0, eq);
      std::string role_text = spec.substr(eq + 1);
      const Receiver* rx = scene.find_receiver(name);
      if (rx == nullptr) throw UnknownReceiver(name);
      double threshold = rx->threshold_dbm;
      if (const auto colon = role_text.find(':'); colon != std::string::npos) {
        try {
          std::size_t used = 0;
          const std::string num = role_text.substr(colon + 1);
          threshold = std::stod(num, &used);
          if (used != num.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw InvalidArgument("--role threshold is not a number in '" + spec + "'");
        }
        role_text.resize(colon);
      }
      const auto role = parse_role(role_text);
      if (!role) throw InvalidArgument("--role: unknown role '" + role_text + "'");
      scene = scene.with_receiver_role(name, *role, threshold);
    }
    return scene;
  }
};

std::ofstream open_output(const fs::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory '" + dir.string() + "'");
  }
}

std::string fixed2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct HeatmapArgs {
  std::string scene_path;
  double angle = 0.0;
  double spacing = 0.1;
  std::string out = "heatmap";
  unsigned threads = 0;
  Overrides overrides;
};

int cmd_heatmap(const HeatmapArgs& args, std::ostream& out) {
  RunDefaults defaults = load_run_defaults_file(args.scene_path);
  const Scene base = load_scene_file(args.scene_path);
  args.overrides.apply(defaults);
  const Scene scene = apply_ris_angle(base, args.angle);

  const GridSpec grid{args.spacing, scene.bounds()};
  const Eigen::MatrixXd map = coverage_grid(scene, grid, defaults.propagation, args.threads);

  const fs::path csv_path = args.out + ".csv";
  const fs::path pgm_path = args.out + ".pgm";
  if (csv_path.has_parent_path()) ensure_directory(csv_path.parent_path());
  {
    auto f = open_output(csv_path);
    write_grid_csv(f, map);
    finish(f, csv_path);
  }
  {
    auto f = open_output(pgm_path, true);
    write_grid_pgm(f, map, defaults.propagation.noise_floor_dbm, scene.tx().power_dbm);
    finish(f, pgm_path);
  }

  out << "grid " << map.cols() << "x" << map.rows() << " angle " << format_angle(args.angle)
      << " spacing " << args.spacing << "\n";
  out << "min " << fixed2(map.minCoeff()) << " dBm\n";
  out << "max " << fixed2(map.maxCoeff()) << " dBm\n";
  for (const auto& rx : scene.receivers()) {
    if (const auto cell = grid.cell_of(rx.position)) {
      out << "receiver " << rx.name << " cell " << cell->first << "," << cell->second << " "
          << fixed2(map(cell->first, cell->second)) << " dBm\n";
    }
  }
  out << "wrote " << csv_path.string() << " " << pgm_path.string() << "\n";
  return kExitOk;
}

struct RunArgs {
  std::string scene_path;
  std::string policy = "static:0";
  std::string out_dir = "run";
  bool linear_mean = false;
  Overrides overrides;
};

int cmd_run(const RunArgs& args, std::ostream& out) {
  RunDefaults defaults = load_run_defaults_file(args.scene_path);
  args.overrides.apply(defaults);
  const Scene scene = args.overrides.apply_roles(load_scene_file(args.scene_path));
  const Policy policy = parse_policy(args.policy);

  const SimulationTrace trace = run_simulation(scene, policy, defaults.timeline, defaults.propagation);
  const MetricsReport report =
      make_report(scene, trace, args.linear_mean ? MeanDomain::Linear : MeanDomain::Db);

  const fs::path dir = args.out_dir;
  ensure_directory(dir);
  {
    const fs::path p = dir / "trace.csv";
    auto f = open_output(p);
    write_trace_csv(f, trace);
    finish(f, p);
  }
  {
    const fs::path p = dir / "metrics.csv";
    auto f = open_output(p);
    write_metrics_csv(f, report);
    finish(f, p);
  }
  std::ostringstream summary;
  write_summary(summary, scene, policy, trace, report);
  {
    const fs::path p = dir / "summary.txt";
    auto f = open_output(p);
    f << summary.str();
    finish(f, p);
  }
  {
    nlohmann::json manifest = {{"scene_id", report.scene_id},
                               {"policy", to_string(policy)},
                               {"mean_domain", args.linear_mean ? "linear" : "db"},
                               {"receivers", trace.receivers},
                               {"selected_angles", trace.selection.selected},
                               {"selection_feasible", trace.selection.feasible}};
    const fs::path p = dir / "run.json";
    auto f = open_output(p);
    f << manifest.dump(2) << "\n";
    finish(f, p);
  }
  out << summary.str();
  return kExitOk;
}

MetricsReport load_run(const fs::path& dir) {
  const fs::path manifest_path = dir / "run.json";
  const fs::path metrics_path = dir / "metrics.csv";
  std::ifstream manifest_in(manifest_path);
  if (!manifest_in) throw IoError("cannot open '" + manifest_path.string() + "'");
  std::ifstream metrics_in(metrics_path);
  if (!metrics_in) throw IoError("cannot open '" + metrics_path.string() + "'");

  nlohmann::json manifest;
  try {
    manifest_in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(manifest_path.string() + ": " + e.what());
  }
  MetricsReport report = read_metrics_csv(metrics_in);
  if (!manifest.is_object() || !manifest.contains("scene_id") || !manifest["scene_id"].is_string()) {
    throw ParseError(manifest_path.string() + ": missing scene_id");
  }
  report.scene_id = manifest["scene_id"].get<std::string>();
  return report;
}

struct CompareArgs {
  std::string run_a;
  std::string run_b;
  std::string out = "compare.csv";
};

int cmd_compare(const CompareArgs& args, std::ostream& out) {
  const MetricsReport a = load_run(args.run_a);
  const MetricsReport b = load_run(args.run_b);
  const DeltaReport delta = compare_policies(a, b);
  const fs::path path = args.out;
  if (path.has_parent_path()) ensure_directory(path.parent_path());
  auto f = open_output(path);
  write_delta_csv(f, delta);
  finish(f, path);
  out << "delta (" << args.run_a << ") - (" << args.run_b << ")\n";
  write_delta_table(out, delta);
  return kExitOk;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const ReceiverSetMismatch*>(&e)) return kExitMismatch;
  return kExitInvalidInput;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"2D RIS propagation simulator", "rissim"};
  app.require_subcommand(1);

  HeatmapArgs heatmap;
  auto* heat = app.add_subcommand("heatmap", "Render a received-power map at one RIS angle");
  heat->add_option("scene", heatmap.scene_path, "Scene file")->required();
  heat->add_option("--angle", heatmap.angle, "RIS angle [deg]");
  heat->add_option("--spacing", heatmap.spacing, "Grid spacing [m]");
  heat->add_option("--out", heatmap.out, "Output prefix (writes <out>.csv and <out>.pgm)");
  heat->add_option("--threads", heatmap.threads, "Worker threads (0 = hardware concurrency)");
  heatmap.overrides.add_propagation(*heat);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Simulate a RIS control policy over time");
  run_cmd->add_option("scene", run_args.scene_path, "Scene file")->required();
  run_cmd->add_option("--policy", run_args.policy,
                      "static:<angle> | periodic | context:all-best | context:minimal-cover");
  run_cmd->add_option("--out", run_args.out_dir, "Output directory");
  run_cmd->add_flag("--linear-mean", run_args.linear_mean,
                    "Average power in mW instead of dBm for the mean statistic");
  run_args.overrides.add_propagation(*run_cmd);
  run_args.overrides.add_timeline(*run_cmd);

  CompareArgs compare;
  auto* cmp = app.add_subcommand("compare", "Difference of two runs' metrics (A - B)");
  cmp->add_option("run_a", compare.run_a, "Run directory A")->required();
  cmp->add_option("run_b", compare.run_b, "Run directory B")->required();
  cmp->add_option("--out", compare.out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "ERROR UsageError: " << one_line(e.what()) << "\n";
    return kExitInvalidInput;
  }

  try {
    if (*heat) return cmd_heatmap(heatmap, out);
    if (*run_cmd) return cmd_run(run_args, out);
    return cmd_compare(compare, out);
  } catch (const Error& e) {
    err << "ERROR " << e.code() << ": " << one_line(e.what()) << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "ERROR Internal: " << one_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace rissim::cli
