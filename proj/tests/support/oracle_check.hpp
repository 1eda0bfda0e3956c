#ifndef RISSIM_TESTS_ORACLE_CHECK_HPP
#define RISSIM_TESTS_ORACLE_CHECK_HPP

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rissim/propagation.hpp"
#include "support/ray_launcher.hpp"

namespace rissim::testing {

struct RandomLayout {
  std::vector<Segment> walls;
  Point tx;
  Point rx;
};

/// 1-4 walls of length >= 1 m in a 10 m square, with tx and rx kept clear
/// of every wall and of each other.
inline RandomLayout random_layout(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  std::uniform_int_distribution<int> count(1, 4);
  while (true) {
    RandomLayout l;
    const int n = count(rng);
    while (static_cast<int>(l.walls.size()) < n) {
      Segment s{{coord(rng), coord(rng)}, {coord(rng), coord(rng)}};
      if (s.length() >= 1.0) l.walls.push_back(s);
    }
    l.tx = {coord(rng), coord(rng)};
    l.rx = {coord(rng), coord(rng)};
    bool clear = (l.tx - l.rx).norm() > 1.0;
    for (const auto& w : l.walls) {
      clear = clear && distance_to_segment(l.tx, w) > 0.3 && distance_to_segment(l.rx, w) > 0.3;
    }
    if (clear) return l;
  }
}

/// True if the image path passes within `margin` of any wall endpoint, i.e.
/// a finite-width beam around it could be clipped.
inline bool path_is_marginal(const RayPath& path, const std::vector<Segment>& walls, double margin) {
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    const Segment leg{path.vertices[i], path.vertices[i + 1]};
    for (const auto& w : walls) {
      if (distance_to_segment(w.a, leg) < margin || distance_to_segment(w.b, leg) < margin) {
        return true;
      }
    }
  }
  return false;
}

struct OracleOutcome {
  bool well_conditioned = true;
  bool matched = true;
  int image_paths = 0;
  int launched_families = 0;
  std::string detail;
};

/// Compares image-method paths of order <= 2 with launched-ray families:
/// every image path needs a launched family with the same wall sequence and
/// length within `rel_tol`, and every launched family needs an image path.
inline OracleOutcome compare_with_launcher(const RandomLayout& layout, double rel_tol = 0.005,
                                           const LaunchConfig& cfg = {}) {
  OracleOutcome out;
  const PathTracer tracer(layout.walls, layout.tx, cfg.max_order);
  const std::vector<RayPath> paths = tracer.trace(layout.rx);

  std::vector<Wall> walls;
  for (const auto& w : layout.walls) walls.push_back({{w.a.x(), w.a.y()}, {w.b.x(), w.b.y()}});
  const auto families =
      launch_rays(walls, {layout.tx.x(), layout.tx.y()}, {layout.rx.x(), layout.rx.y()}, cfg);

  for (const auto& p : paths) {
    if (path_is_marginal(p, layout.walls, cfg.endpoint_margin)) out.well_conditioned = false;
  }
  for (const auto& [seq, fam] : families) {
    if (fam.marginal) out.well_conditioned = false;
  }
  out.image_paths = static_cast<int>(paths.size());
  out.launched_families = static_cast<int>(families.size());

  std::ostringstream why;
  std::size_t matched_families = 0;
  for (const auto& p : paths) {
    auto it = families.find(p.bounce_walls);
    if (it == families.end()) {
      out.matched = false;
      why << "image path of order " << p.order() << " (length " << p.length_m
          << ") has no launched match; ";
      continue;
    }
    ++matched_families;
    if (std::abs(it->second.length - p.length_m) > rel_tol * p.length_m) {
      out.matched = false;
      why << "length mismatch " << p.length_m << " vs " << it->second.length << "; ";
    }
  }
  if (matched_families != families.size()) {
    out.matched = false;
    why << families.size() - matched_families << " launched families missing from image method; ";
  }
  out.detail = why.str();
  return out;
}

}  // namespace rissim::testing

#endif  // RISSIM_TESTS_ORACLE_CHECK_HPP
