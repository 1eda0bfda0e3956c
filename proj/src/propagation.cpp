#include "rissim/propagation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "rissim/errors.hpp"

namespace rissim {

namespace {

bool same_segment(const Segment& s, const Segment& t) {
  const auto close = [](const Point& p, const Point& q) { return (p - q).norm() <= kGeomEps; };
  return (close(s.a, t.a) && close(s.b, t.b)) || (close(s.a, t.b) && close(s.b, t.a));
}

double distance_to_line(const Point& p, const Segment& s) {
  const Point d = s.direction().normalized();
  return std::abs(cross2<double>(d, p - s.a));
}

}  // namespace

PathTracer::PathTracer(std::span<const Segment> walls, const Point& tx, int max_order)
    : walls_(walls.begin(), walls.end()), tx_(tx) {
  if (max_order < 0 || max_order > PropagationParams::kMaxSupportedOrder) {
    throw InvalidArgument("max_order out of range");
  }
  // A wall geometrically identical to an earlier one would re-derive the
  // same physical paths; only the first copy takes part in the image tree.
  std::vector<bool> canonical(walls_.size(), true);
  for (std::size_t i = 0; i < walls_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (same_segment(walls_[i], walls_[j])) {
        canonical[i] = false;
        break;
      }
    }
  }

  // Breadth-first so that nodes_ is ordered by bounce order, then by wall
  // sequence.
  std::size_t level_begin = 0;
  for (std::size_t w = 0; w < walls_.size() && max_order >= 1; ++w) {
    if (!canonical[w] || distance_to_line(tx_, walls_[w]) <= kGeomEps) continue;
    nodes_.push_back({mirror_point(tx_, walls_[w]), w, -1, 1});
  }
  for (int order = 2; order <= max_order; ++order) {
    const std::size_t level_end = nodes_.size();
    for (std::size_t n = level_begin; n < level_end; ++n) {
      for (std::size_t w = 0; w < walls_.size(); ++w) {
        const ImageNode parent = nodes_[n];
        if (!canonical[w] || w == parent.wall) continue;
        if (distance_to_line(parent.image, walls_[w]) <= kGeomEps) continue;
        nodes_.push_back(
            {mirror_point(parent.image, walls_[w]), w, static_cast<int>(n), order});
      }
    }
    level_begin = level_end;
  }
}

bool PathTracer::occluded(const Point& p, const Point& q) const {
  for (const auto& w : walls_) {
    if (segment_blocks(p, q, w)) return true;
  }
  return false;
}

std::vector<RayPath> PathTracer::trace(const Point& rx) const {
  std::vector<RayPath> paths;
  if (!occluded(tx_, rx)) {
    paths.push_back({{tx_, rx}, {}, {}, (rx - tx_).norm()});
  }

  std::array<std::size_t, PropagationParams::kMaxSupportedOrder> seq{};
  std::array<Point, PropagationParams::kMaxSupportedOrder> bounce{};
  for (const auto& node : nodes_) {
    // Walk from the deepest image back towards tx, projecting rx onto each wall.
    Point target = rx;
    const ImageNode* cur = &node;
    int k = node.order;
    bool valid = true;
    while (cur != nullptr) {
      --k;
      const Segment& wall = walls_[cur->wall];
      const Point d = target - cur->image;
      const Point e = wall.direction();
      const double denom = cross2<double>(d, e);
      const double dlen = d.norm();
      if (std::abs(denom) <= 1e-12 * dlen * e.norm()) {
        valid = false;
        break;
      }
      const Point w = wall.a - cur->image;
      const double t = cross2<double>(w, e) / denom;
      const double u = cross2<double>(w, d) / denom;
      const double u_eps = kGeomEps / e.norm();
      if (t * dlen <= kRayEps || (1.0 - t) * dlen <= kRayEps || u < -u_eps || u > 1.0 + u_eps) {
        valid = false;
        break;
      }
      target = cur->image + t * d;
      seq[k] = cur->wall;
      bounce[k] = target;
      cur = cur->parent < 0 ? nullptr : &nodes_[cur->parent];
    }
    if (!valid) continue;

    RayPath path;
    path.vertices.reserve(node.order + 2);
    path.vertices.push_back(tx_);
    for (int i = 0; i < node.order; ++i) path.vertices.push_back(bounce[i]);
    path.vertices.push_back(rx);
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
      if (occluded(path.vertices[i], path.vertices[i + 1])) {
        valid = false;
        break;
      }
      path.length_m += (path.vertices[i + 1] - path.vertices[i]).norm();
    }
    if (!valid) continue;
    for (int i = 0; i < node.order; ++i) {
      path.bounce_walls.push_back(seq[i]);
      path.bounce_segments.push_back(walls_[seq[i]]);
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

std::vector<RayPath> trace_paths(const Scene& scene, const Point& rx_pos,
                                 const PropagationParams& params) {
  params.validate();
  return PathTracer(scene.effective_walls(), scene.tx().position, params.max_order).trace(rx_pos);
}

double fspl_db(double distance_m, double frequency_hz) {
  return 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_hz) - 147.55;
}

double path_gain_db(const RayPath& path, double frequency_hz, const PropagationParams& params) {
  if (path.length_m < 1e-3) {
    throw DegeneratePath("path length " + std::to_string(path.length_m) + " m is below 1 mm");
  }
  return -(fspl_db(path.length_m, frequency_hz) + path.order() * params.reflection_loss_db);
}

double combine_power_dbm(double tx_power_dbm, std::span<const double> gains_db,
                         const PropagationParams& params) {
  if (gains_db.empty()) return params.noise_floor_dbm;
  const double strongest = tx_power_dbm + *std::max_element(gains_db.begin(), gains_db.end());
  double result = strongest;
  if (params.summation == Summation::PowerSum) {
    // Sum in linear power, scaled by the strongest term to stay in range.
    double acc = 0.0;
    for (double g : gains_db) acc += std::pow(10.0, (tx_power_dbm + g - strongest) / 10.0);
    result = strongest + 10.0 * std::log10(acc);
  }
  return std::max(result, params.noise_floor_dbm);
}

namespace {

double power_from_paths(const std::vector<RayPath>& paths, const Transmitter& tx,
                        const PropagationParams& params) {
  std::vector<double> gains;
  gains.reserve(paths.size());
  for (const auto& p : paths) gains.push_back(path_gain_db(p, tx.frequency_hz, params));
  return combine_power_dbm(tx.power_dbm, gains, params);
}

}  // namespace

double received_power_dbm(const Scene& scene, const Point& rx_pos,
                          const PropagationParams& params) {
  return power_from_paths(trace_paths(scene, rx_pos, params), scene.tx(), params);
}

int GridSpec::cols() const {
  return static_cast<int>(std::ceil(bounds.width() / spacing - 1e-9));
}

int GridSpec::rows() const {
  return static_cast<int>(std::ceil(bounds.height() / spacing - 1e-9));
}

Point GridSpec::cell_center(int row, int col) const {
  return {bounds.min.x() + (col + 0.5) * spacing, bounds.max.y() - (row + 0.5) * spacing};
}

std::optional<std::pair<int, int>> GridSpec::cell_of(const Point& p) const {
  const int col = static_cast<int>(std::floor((p.x() - bounds.min.x()) / spacing));
  const int row = static_cast<int>(std::floor((bounds.max.y() - p.y()) / spacing));
  if (row < 0 || col < 0 || row >= rows() || col >= cols()) return std::nullopt;
  return std::make_pair(row, col);
}

Eigen::MatrixXd coverage_grid(const Scene& scene, const GridSpec& grid,
                              const PropagationParams& params, unsigned threads) {
  params.validate();
  if (!(grid.spacing > 0) || !std::isfinite(grid.spacing)) {
    throw InvalidArgument("grid spacing must be > 0");
  }
  if (!(grid.bounds.width() > 0 && grid.bounds.height() > 0)) {
    throw InvalidArgument("grid bounds must have positive extent");
  }
  const double cells = std::ceil(grid.bounds.width() / grid.spacing - 1e-9) *
                       std::ceil(grid.bounds.height() / grid.spacing - 1e-9);
  if (cells > static_cast<double>(kMaxGridCells)) {
    throw GridTooLarge("grid of " + std::to_string(static_cast<long long>(cells)) +
                       " cells exceeds the limit of " + std::to_string(kMaxGridCells));
  }

  const int rows = grid.rows();
  const int cols = grid.cols();
  Eigen::MatrixXd out(rows, cols);
  const PathTracer tracer(scene.effective_walls(), scene.tx().position, params.max_order);
  const auto walls = scene.effective_walls();

  const auto fill_row = [&](int r) {
    for (int c = 0; c < cols; ++c) {
      const Point p = grid.cell_center(r, c);
      double value = params.noise_floor_dbm;
      const bool on_wall = std::any_of(walls.begin(), walls.end(), [&](const Segment& w) {
        return distance_to_segment(p, w) <= kGeomEps;
      });
      if (!scene.bounds().contains_strictly(p) || on_wall) {
        value = params.noise_floor_dbm;
      } else if ((p - scene.tx().position).norm() < 1e-3) {
        value = std::max(scene.tx().power_dbm, params.noise_floor_dbm);
      } else {
        value = power_from_paths(tracer.trace(p), scene.tx(), params);
      }
      out(r, c) = value;
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(rows));
  if (threads <= 1) {
    for (int r = 0; r < rows; ++r) fill_row(r);
    return out;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      for (int r = static_cast<int>(t); r < rows; r += static_cast<int>(threads)) fill_row(r);
    });
  }
  workers.clear();  // joins
  return out;
}

void write_grid_csv(std::ostream& out, const Eigen::MatrixXd& grid) {
  char buf[32];
  for (Eigen::Index r = 0; r < grid.rows(); ++r) {
    for (Eigen::Index c = 0; c < grid.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.2f", grid(r, c));
      if (c > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_grid_pgm(std::ostream& out, const Eigen::MatrixXd& grid, double noise_floor_dbm,
                    double max_dbm) {
  out << "P5\n" << grid.cols() << ' ' << grid.rows() << "\n255\n";
  const double span = max_dbm - noise_floor_dbm;
  for (Eigen::Index r = 0; r < grid.rows(); ++r) {
    for (Eigen::Index c = 0; c < grid.cols(); ++c) {
      double level = span > 0 ? (grid(r, c) - noise_floor_dbm) / span * 255.0 : 0.0;
      level = std::clamp(level, 0.0, 255.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(level))));
    }
  }
}

}  // namespace rissim
