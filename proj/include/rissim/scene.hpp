#ifndef RISSIM_SCENE_HPP
#define RISSIM_SCENE_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rissim/config.hpp"
#include "rissim/geometry.hpp"

namespace rissim {

enum class ReceiverRole { Sensor, Desired, Interfered };

std::string_view to_string(ReceiverRole role);
std::optional<ReceiverRole> parse_role(std::string_view text);

struct Transmitter {
  Point position = Point::Zero();
  double power_dbm = 20.0;
  double frequency_hz = 3.5e9;
};

struct Receiver {
  std::string name;
  Point position = Point::Zero();
  ReceiverRole role = ReceiverRole::Desired;
  double threshold_dbm = -85.0;
};

/// Rotatable reflector. `segment` is the 0-degree reference pose and the
/// rotation pivot is its midpoint.
struct RisPanel {
  Segment segment;
  std::vector<double> allowed_angles;

  Point pivot() const { return segment.midpoint(); }
  bool allows(double angle_deg) const;
};

/// Axis-aligned rectangle.
struct Bounds {
  Point min = Point::Zero();
  Point max = Point::Zero();

  double width() const { return max.x() - min.x(); }
  double height() const { return max.y() - min.y(); }
  bool contains_strictly(const Point& p) const {
    return p.x() > min.x() && p.x() < max.x() && p.y() > min.y() && p.y() < max.y();
  }
};

/// Immutable world model: walls, one RIS panel, a transmitter and a set of
/// named receivers. A Scene also carries the RIS angle it is configured at;
/// effective_walls() is walls followed by the RIS panel at that angle.
class Scene {
 public:
  /// Validates every invariant; throws ValidationError naming the field.
  static Scene create(Bounds bounds, std::vector<Segment> walls, RisPanel ris, Transmitter tx,
                      std::vector<Receiver> receivers);

  const Bounds& bounds() const { return bounds_; }
  const std::vector<Segment>& walls() const { return walls_; }
  const RisPanel& ris() const { return ris_; }
  const Transmitter& tx() const { return tx_; }
  const std::vector<Receiver>& receivers() const { return receivers_; }
  double ris_angle() const { return ris_angle_; }

  std::span<const Segment> effective_walls() const { return effective_walls_; }
  /// Index of the RIS panel within effective_walls().
  std::size_t ris_wall_index() const { return walls_.size(); }

  const Receiver* find_receiver(std::string_view name) const;

  /// Copy with one receiver's role and threshold replaced.
  Scene with_receiver_role(std::string_view name, ReceiverRole role, double threshold_dbm) const;

 private:
  friend Scene apply_ris_angle(const Scene& scene, double angle_deg);

  Scene() = default;
  void rebuild_effective_walls();

  Bounds bounds_;
  std::vector<Segment> walls_;
  RisPanel ris_;
  Transmitter tx_;
  std::vector<Receiver> receivers_;
  double ris_angle_ = 0.0;
  std::vector<Segment> effective_walls_;
};

/// Copy of `scene` with the RIS rotated to angle_deg about its pivot.
/// Throws AngleNotAllowed if the angle is not one of ris.allowed_angles.
Scene apply_ris_angle(const Scene& scene, double angle_deg);

/// Simulation settings that a scene file may carry alongside the world.
struct RunDefaults {
  PropagationParams propagation;
  TimelineConfig timeline;
};

/// Parses a scene file (JSON, schema in docs/scene-format.md).
/// Throws ParseError for malformed text or missing fields and
/// ValidationError for invariant violations.
Scene load_scene(std::string_view text);
RunDefaults load_run_defaults(std::string_view text);

Scene load_scene_file(const std::string& path);
RunDefaults load_run_defaults_file(const std::string& path);

std::string serialize_scene(const Scene& scene, const RunDefaults& defaults = {});

/// Stable hex digest of the serialized base scene (RIS angle excluded).
std::string scene_fingerprint(const Scene& scene);

/// Reference layout: a 30 m x 10 m room split by a partial wall, with the
/// RIS panel in front of the right wall.
Scene canonical_scene();

std::vector<double> default_allowed_angles();

}  // namespace rissim

#endif  // RISSIM_SCENE_HPP
