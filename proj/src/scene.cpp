#include "rissim/scene.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rissim/errors.hpp"

namespace rissim {

using nlohmann::json;

std::string_view to_string(ReceiverRole role) {
  switch (role) {
    case ReceiverRole::Sensor:
      return "sensor";
    case ReceiverRole::Desired:
      return "desired";
    case ReceiverRole::Interfered:
      return "interfered";
  }
  return "unknown";
}

std::optional<ReceiverRole> parse_role(std::string_view text) {
  if (text == "sensor") return ReceiverRole::Sensor;
  if (text == "desired") return ReceiverRole::Desired;
  if (text == "interfered") return ReceiverRole::Interfered;
  return std::nullopt;
}

bool RisPanel::allows(double angle_deg) const {
  for (double a : allowed_angles) {
    if (a == angle_deg) return true;
  }
  return false;
}

std::vector<double> default_allowed_angles() {
  std::vector<double> angles;
  for (int a = -20; a <= 20; a += 5) angles.push_back(a);
  return angles;
}

void PropagationParams::validate() const {
  if (max_order < 0 || max_order > kMaxSupportedOrder) {
    throw InvalidArgument("propagation.max_order must be in [0, " +
                          std::to_string(kMaxSupportedOrder) + "]");
  }
  if (!std::isfinite(reflection_loss_db) || reflection_loss_db < 0) {
    throw InvalidArgument("propagation.reflection_loss_db must be finite and >= 0");
  }
  if (!std::isfinite(noise_floor_dbm)) {
    throw InvalidArgument("propagation.noise_floor_dbm must be finite");
  }
}

void TimelineConfig::validate() const {
  if (total_slots <= 0) throw InvalidArgument("timeline.total_slots must be > 0");
  if (dwell_slots < 1) throw InvalidArgument("timeline.dwell_slots must be >= 1");
  if (probe_dwell < 1) throw InvalidArgument("timeline.probe_dwell must be >= 1");
}

namespace {

void check_point(const Point& p, const std::string& field) {
  if (!is_finite(p)) throw ValidationError(field, "coordinates must be finite");
}

}  // namespace

Scene Scene::create(Bounds bounds, std::vector<Segment> walls, RisPanel ris, Transmitter tx,
                    std::vector<Receiver> receivers) {
  check_point(bounds.min, "bounds.min");
  check_point(bounds.max, "bounds.max");
  if (!(bounds.max.x() > bounds.min.x() && bounds.max.y() > bounds.min.y())) {
    throw ValidationError("bounds", "max must exceed min on both axes");
  }

  for (std::size_t i = 0; i < walls.size(); ++i) {
    const std::string field = "walls[" + std::to_string(i) + "]";
    check_point(walls[i].a, field + ".a");
    check_point(walls[i].b, field + ".b");
    if (is_degenerate(walls[i])) throw ValidationError(field, "zero-length wall");
  }

  check_point(ris.segment.a, "ris.a");
  check_point(ris.segment.b, "ris.b");
  if (is_degenerate(ris.segment)) throw ValidationError("ris", "zero-length RIS segment");
  if (ris.allowed_angles.empty()) {
    throw ValidationError("ris.allowed_angles", "must not be empty");
  }
  for (std::size_t i = 0; i < ris.allowed_angles.size(); ++i) {
    if (!std::isfinite(ris.allowed_angles[i])) {
      throw ValidationError("ris.allowed_angles", "angles must be finite");
    }
    if (i > 0 && !(ris.allowed_angles[i] > ris.allowed_angles[i - 1])) {
      throw ValidationError("ris.allowed_angles", "angles must be strictly increasing");
    }
  }
  const Point ris_dir = ris.segment.direction().normalized();
  bool has_reference_wall = false;
  for (const auto& w : walls) {
    if (std::abs(cross2<double>(ris_dir, w.direction().normalized())) < 1e-9) {
      has_reference_wall = true;
      break;
    }
  }
  if (!has_reference_wall) {
    throw ValidationError("ris", "no wall parallel to the RIS segment at 0 degrees");
  }

  check_point(tx.position, "tx.position");
  if (!bounds.contains_strictly(tx.position)) {
    throw ValidationError("tx.position", "transmitter must lie strictly inside bounds");
  }
  if (!std::isfinite(tx.power_dbm)) throw ValidationError("tx.power_dbm", "must be finite");
  if (!std::isfinite(tx.frequency_hz) || tx.frequency_hz <= 0) {
    throw ValidationError("tx.frequency_hz", "must be > 0");
  }

  std::set<std::string> names;
  for (std::size_t i = 0; i < receivers.size(); ++i) {
    const auto& rx = receivers[i];
    if (rx.name.empty()) {
      throw ValidationError("receivers[" + std::to_string(i) + "].name", "must not be empty");
    }
    const std::string field = "receivers[" + rx.name + "]";
    if (!names.insert(rx.name).second) throw ValidationError(field + ".name", "duplicate name");
    check_point(rx.position, field + ".position");
    if (!bounds.contains_strictly(rx.position)) {
      throw ValidationError(field + ".position", "receiver must lie strictly inside bounds");
    }
    if ((rx.position - tx.position).norm() < 1e-3) {
      throw ValidationError(field + ".position", "receiver coincides with the transmitter");
    }
    if (!std::isfinite(rx.threshold_dbm)) {
      throw ValidationError(field + ".threshold_dbm", "must be finite");
    }
  }

  Scene scene;
  scene.bounds_ = bounds;
  scene.walls_ = std::move(walls);
  scene.ris_ = std::move(ris);
  scene.tx_ = tx;
  scene.receivers_ = std::move(receivers);
  scene.rebuild_effective_walls();
  return scene;
}

void Scene::rebuild_effective_walls() {
  effective_walls_ = walls_;
  effective_walls_.push_back(rotate_segment(ris_.segment, ris_angle_, ris_.pivot()));
}

const Receiver* Scene::find_receiver(std::string_view name) const {
  for (const auto& rx : receivers_) {
    if (rx.name == name) return &rx;
  }
  return nullptr;
}

Scene Scene::with_receiver_role(std::string_view name, ReceiverRole role,
                                double threshold_dbm) const {
  Scene copy = *this;
  for (auto& rx : copy.receivers_) {
    if (rx.name == name) {
      if (!std::isfinite(threshold_dbm)) {
        throw ValidationError("receivers[" + rx.name + "].threshold_dbm", "must be finite");
      }
      rx.role = role;
      rx.threshold_dbm = threshold_dbm;
      return copy;
    }
  }
  throw UnknownReceiver(std::string(name));
}

Scene apply_ris_angle(const Scene& scene, double angle_deg) {
  if (!scene.ris().allows(angle_deg)) throw AngleNotAllowed(angle_deg);
  Scene copy = scene;
  copy.ris_angle_ = angle_deg;
  copy.rebuild_effective_walls();
  return copy;
}

// ---------------------------------------------------------------------------
// Scene file I/O

namespace {

std::string join_path(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError((path.empty() ? "scene" : path) + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError("missing field '" + join_path(path, key) + "'");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path + ": expected an integer");
  return v.get<int>();
}

Point as_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2) throw ParseError(path + ": expected [x, y]");
  return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]")};
}

double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_number(*it, join_path(path, key));
}

json parse_root(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scene file: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("scene file must contain a JSON object");
  return root;
}

double default_threshold(ReceiverRole role) {
  return role == ReceiverRole::Sensor ? -95.0 : -85.0;
}

json point_json(const Point& p) { return json::array({p.x(), p.y()}); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

}  // namespace

Scene load_scene(std::string_view text) {
  const json root = parse_root(text);

  const json& jb = require(root, "bounds", "");
  Bounds bounds{as_point(require(jb, "min", "bounds"), "bounds.min"),
                as_point(require(jb, "max", "bounds"), "bounds.max")};

  const json& jw = require(root, "walls", "");
  if (!jw.is_array()) throw ParseError("walls: expected an array");
  std::vector<Segment> walls;
  for (std::size_t i = 0; i < jw.size(); ++i) {
    const std::string path = "walls[" + std::to_string(i) + "]";
    walls.push_back({as_point(require(jw[i], "a", path), path + ".a"),
                     as_point(require(jw[i], "b", path), path + ".b")});
  }

  const json& jr = require(root, "ris", "");
  RisPanel ris{{as_point(require(jr, "a", "ris"), "ris.a"),
                as_point(require(jr, "b", "ris"), "ris.b")},
               default_allowed_angles()};
  if (auto it = jr.find("allowed_angles"); it != jr.end()) {
    if (!it->is_array()) throw ParseError("ris.allowed_angles: expected an array");
    ris.allowed_angles.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      ris.allowed_angles.push_back(
          as_number((*it)[i], "ris.allowed_angles[" + std::to_string(i) + "]"));
    }
  }

  const json& jt = require(root, "tx", "");
  Transmitter tx;
  tx.position = as_point(require(jt, "position", "tx"), "tx.position");
  tx.power_dbm = number_or(jt, "power_dbm", tx.power_dbm, "tx");
  tx.frequency_hz = number_or(jt, "frequency_hz", tx.frequency_hz, "tx");

  const json& jrx = require(root, "receivers", "");
  if (!jrx.is_array()) throw ParseError("receivers: expected an array");
  std::vector<Receiver> receivers;
  for (std::size_t i = 0; i < jrx.size(); ++i) {
    const std::string path = "receivers[" + std::to_string(i) + "]";
    const json& name = require(jrx[i], "name", path);
    if (!name.is_string()) throw ParseError(path + ".name: expected a string");
    const json& role_text = require(jrx[i], "role", path);
    if (!role_text.is_string()) throw ParseError(path + ".role: expected a string");
    const auto role = parse_role(role_text.get<std::string>());
    if (!role) {
      throw ParseError(path + ".role: expected one of sensor, desired, interfered");
    }
    Receiver rx;
    rx.name = name.get<std::string>();
    rx.position = as_point(require(jrx[i], "position", path), path + ".position");
    rx.role = *role;
    rx.threshold_dbm = number_or(jrx[i], "threshold_dbm", default_threshold(*role), path);
    receivers.push_back(std::move(rx));
  }

  return Scene::create(bounds, std::move(walls), std::move(ris), tx, std::move(receivers));
}

RunDefaults load_run_defaults(std::string_view text) {
  const json root = parse_root(text);
  RunDefaults d;
  if (auto it = root.find("propagation"); it != root.end()) {
    const json& jp = *it;
    if (!jp.is_object()) throw ParseError("propagation: expected an object");
    if (auto f = jp.find("max_order"); f != jp.end()) {
      d.propagation.max_order = as_int(*f, "propagation.max_order");
    }
    d.propagation.reflection_loss_db =
        number_or(jp, "reflection_loss_db", d.propagation.reflection_loss_db, "propagation");
    d.propagation.noise_floor_dbm =
        number_or(jp, "noise_floor_dbm", d.propagation.noise_floor_dbm, "propagation");
    if (auto f = jp.find("summation"); f != jp.end()) {
      if (*f == "power_sum") {
        d.propagation.summation = Summation::PowerSum;
      } else if (*f == "strongest_path") {
        d.propagation.summation = Summation::StrongestPath;
      } else {
        throw ParseError("propagation.summation: expected power_sum or strongest_path");
      }
    }
  }
  if (auto it = root.find("timeline"); it != root.end()) {
    const json& jt = *it;
    if (!jt.is_object()) throw ParseError("timeline: expected an object");
    if (auto f = jt.find("total_slots"); f != jt.end()) {
      d.timeline.total_slots = as_int(*f, "timeline.total_slots");
    }
    if (auto f = jt.find("dwell_slots"); f != jt.end()) {
      d.timeline.dwell_slots = as_int(*f, "timeline.dwell_slots");
    }
    if (auto f = jt.find("probe_dwell"); f != jt.end()) {
      d.timeline.probe_dwell = as_int(*f, "timeline.probe_dwell");
    }
  }
  try {
    d.propagation.validate();
    d.timeline.validate();
  } catch (const InvalidArgument& e) {
    std::string msg = e.what();
    throw ValidationError(msg.substr(0, msg.find(' ')), msg);
  }
  return d;
}

Scene load_scene_file(const std::string& path) { return load_scene(read_file(path)); }

RunDefaults load_run_defaults_file(const std::string& path) {
  return load_run_defaults(read_file(path));
}

std::string serialize_scene(const Scene& scene, const RunDefaults& defaults) {
  json root = json::object();
  root["bounds"] = {{"min", point_json(scene.bounds().min)},
                    {"max", point_json(scene.bounds().max)}};
  json walls = json::array();
  for (const auto& w : scene.walls()) {
    walls.push_back({{"a", point_json(w.a)}, {"b", point_json(w.b)}});
  }
  root["walls"] = walls;
  root["ris"] = {{"a", point_json(scene.ris().segment.a)},
                 {"b", point_json(scene.ris().segment.b)},
                 {"allowed_angles", scene.ris().allowed_angles}};
  root["tx"] = {{"position", point_json(scene.tx().position)},
                {"power_dbm", scene.tx().power_dbm},
                {"frequency_hz", scene.tx().frequency_hz}};
  json receivers = json::array();
  for (const auto& rx : scene.receivers()) {
    receivers.push_back({{"name", rx.name},
                         {"position", point_json(rx.position)},
                         {"role", std::string(to_string(rx.role))},
                         {"threshold_dbm", rx.threshold_dbm}});
  }
  root["receivers"] = receivers;
  const auto& p = defaults.propagation;
  root["propagation"] = {
      {"max_order", p.max_order},
      {"reflection_loss_db", p.reflection_loss_db},
      {"summation", p.summation == Summation::PowerSum ? "power_sum" : "strongest_path"},
      {"noise_floor_dbm", p.noise_floor_dbm}};
  const auto& t = defaults.timeline;
  root["timeline"] = {{"total_slots", t.total_slots},
                      {"dwell_slots", t.dwell_slots},
                      {"probe_dwell", t.probe_dwell}};
  return root.dump(2) + "\n";
}

std::string scene_fingerprint(const Scene& scene) {
  // FNV-1a over the canonical serialization of the world only.
  const std::string text = serialize_scene(scene);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scene canonical_scene() {
  const Bounds bounds{{0.0, 0.0}, {30.0, 10.0}};
  std::vector<Segment> walls = {
      {{0.0, 0.0}, {30.0, 0.0}},    // floor
      {{30.0, 0.0}, {30.0, 10.0}},  // right wall
      {{30.0, 10.0}, {0.0, 10.0}},  // top
      {{0.0, 10.0}, {0.0, 0.0}},    // left wall
      {{12.0, 0.0}, {12.0, 9.0}},   // partition, open for y in [9, 10]
  };
  RisPanel ris{{{29.9, 3.0}, {29.9, 7.0}}, default_allowed_angles()};
  Transmitter tx{{2.0, 1.0}, 20.0, 3.5e9};
  std::vector<Receiver> receivers = {
      {"A", {14.0, 6.0}, ReceiverRole::Sensor, -95.0},
      {"B", {19.5, 9.5}, ReceiverRole::Desired, -85.0},
      {"C", {25.0, 9.5}, ReceiverRole::Interfered, -85.0},
  };
  return Scene::create(bounds, std::move(walls), std::move(ris), tx, std::move(receivers));
}

}  // namespace rissim
