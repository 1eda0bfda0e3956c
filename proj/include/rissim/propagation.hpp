#ifndef RISSIM_PROPAGATION_HPP
#define RISSIM_PROPAGATION_HPP

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rissim/config.hpp"
#include "rissim/geometry.hpp"
#include "rissim/scene.hpp"

namespace rissim {

/// One specular propagation path: tx, bounce points..., rx.
struct RayPath {
  std::vector<Point> vertices;
  std::vector<std::size_t> bounce_walls;  // indices into the traced wall list
  std::vector<Segment> bounce_segments;
  double length_m = 0.0;

  int order() const { return static_cast<int>(bounce_walls.size()); }
};

/// Image-method tracer for a fixed wall set and transmitter. The image tree
/// (every admissible bounce sequence up to max_order with its mirrored source)
/// is built once; trace() then only back-projects and checks occlusion, so a
/// tracer can be reused across many receiver positions and threads.
class PathTracer {
 public:
  PathTracer(std::span<const Segment> walls, const Point& tx, int max_order);

  /// All valid paths to rx, ordered by bounce order then by wall sequence.
  std::vector<RayPath> trace(const Point& rx) const;

  std::size_t candidate_count() const { return nodes_.size(); }

 private:
  struct ImageNode {
    Point image;
    std::size_t wall;
    int parent;  // index into nodes_, -1 for first-order images
    int order;
  };

  bool occluded(const Point& p, const Point& q) const;

  std::vector<Segment> walls_;
  Point tx_;
  std::vector<ImageNode> nodes_;
};

/// Image-method paths from scene.tx() to rx_pos over scene.effective_walls().
std::vector<RayPath> trace_paths(const Scene& scene, const Point& rx_pos,
                                 const PropagationParams& params);

/// Free-space path loss in dB, d in meters, f in Hz.
double fspl_db(double distance_m, double frequency_hz);

/// -(FSPL + order * reflection_loss_db). Throws DegeneratePath for
/// paths shorter than 1 mm.
double path_gain_db(const RayPath& path, double frequency_hz, const PropagationParams& params);

/// Combines per-path gains with the transmit power according to
/// params.summation, clamped below at the noise floor.
double combine_power_dbm(double tx_power_dbm, std::span<const double> gains_db,
                         const PropagationParams& params);

double received_power_dbm(const Scene& scene, const Point& rx_pos,
                          const PropagationParams& params);

struct GridSpec {
  double spacing = 0.1;
  Bounds bounds;

  int cols() const;
  int rows() const;
  /// Center of cell (row, col); row 0 is the top (max y) edge.
  Point cell_center(int row, int col) const;
  /// Cell containing p, if p lies inside the grid.
  std::optional<std::pair<int, int>> cell_of(const Point& p) const;
};

inline constexpr long long kMaxGridCells = 10'000'000;

/// Received power at each cell center, rows x cols. Cells outside the scene
/// bounds or lying on a wall hold the noise floor. Rows are computed in
/// parallel; the result does not depend on the thread count.
Eigen::MatrixXd coverage_grid(const Scene& scene, const GridSpec& grid,
                              const PropagationParams& params, unsigned threads = 0);

/// Row-major, one value per cell, two decimals.
void write_grid_csv(std::ostream& out, const Eigen::MatrixXd& grid);

/// Binary 8-bit PGM; [noise_floor, max_dbm] maps linearly onto [0, 255].
void write_grid_pgm(std::ostream& out, const Eigen::MatrixXd& grid, double noise_floor_dbm,
                    double max_dbm);

}  // namespace rissim

#endif  // RISSIM_PROPAGATION_HPP
