#ifndef RISSIM_CONFIG_HPP
#define RISSIM_CONFIG_HPP

namespace rissim {

enum class Summation { PowerSum, StrongestPath };

struct PropagationParams {
  int max_order = 3;
  double reflection_loss_db = 3.0;  // per bounce
  Summation summation = Summation::PowerSum;
  double noise_floor_dbm = -200.0;

  static constexpr int kMaxSupportedOrder = 4;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct TimelineConfig {
  int total_slots = 96;
  int dwell_slots = 2;  // slots per angle for periodic and exploit phases
  int probe_dwell = 1;  // slots per angle during the context-aware probe

  void validate() const;
};

}  // namespace rissim

#endif  // RISSIM_CONFIG_HPP
