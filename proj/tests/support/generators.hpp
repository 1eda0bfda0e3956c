#ifndef RISSIM_TESTS_GENERATORS_HPP
#define RISSIM_TESTS_GENERATORS_HPP

// Small hand-rolled generators for property tests. Every generator takes the
// engine explicitly so a failing case can be replayed from its seed.

#include <random>
#include <vector>

#include "rissim/geometry.hpp"

namespace rissim::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Point random_point(Rng& rng, double lo = -50.0, double hi = 50.0) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

/// Segment of length at least min_len.
inline Segment random_segment(Rng& rng, double min_len = 0.5, double lo = -50.0,
                              double hi = 50.0) {
  while (true) {
    Segment s{random_point(rng, lo, hi), random_point(rng, lo, hi)};
    if (s.length() >= min_len) return s;
  }
}

inline Point random_unit(Rng& rng) {
  const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return {std::cos(a), std::sin(a)};
}

}  // namespace rissim::testing

#endif  // RISSIM_TESTS_GENERATORS_HPP
