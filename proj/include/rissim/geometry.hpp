#ifndef RISSIM_GEOMETRY_HPP
#define RISSIM_GEOMETRY_HPP

// Exact 2D primitives used by the image-method tracer. Everything here is a
// pure function templated on the scalar type, so the tracer can be run in
// double (the default) or long double for reference checks.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace rissim {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

using Point = Vector2<double>;

/// Coincidence tolerance for points, in meters.
inline constexpr double kGeomEps = 1e-9;
/// Minimum ray parameter counted as "ahead of the origin", in meters.
/// Keeps a reflected ray from re-hitting the surface it just left.
inline constexpr double kRayEps = 1e-6;

template <typename Scalar>
struct SegmentT {
  Vector2<Scalar> a;
  Vector2<Scalar> b;

  Vector2<Scalar> direction() const { return b - a; }
  Scalar length() const { return (b - a).norm(); }
  Vector2<Scalar> midpoint() const { return (a + b) / Scalar(2); }

  /// Unit normal, rotated +90 degrees from a->b.
  Vector2<Scalar> normal() const {
    const Vector2<Scalar> d = (b - a).normalized();
    return {-d.y(), d.x()};
  }

  bool operator==(const SegmentT&) const = default;
};

template <typename Scalar>
struct RayT {
  Vector2<Scalar> origin;
  Vector2<Scalar> dir;  // unit length
};

template <typename Scalar>
struct Hit {
  Scalar t;
  Vector2<Scalar> point;
};

using Segment = SegmentT<double>;
using Ray = RayT<double>;

template <typename Scalar>
Scalar cross2(const Vector2<Scalar>& u, const Vector2<Scalar>& v) {
  return u.x() * v.y() - u.y() * v.x();
}

template <typename Scalar>
bool is_finite(const Vector2<Scalar>& p) {
  return std::isfinite(p.x()) && std::isfinite(p.y());
}

template <typename Scalar>
bool is_degenerate(const SegmentT<Scalar>& s) {
  return (s.b - s.a).norm() <= Scalar(kGeomEps);
}

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Smallest t > kRayEps with origin + t*dir on the segment (endpoints
/// inclusive). Parallel and collinear configurations report no hit.
template <typename Scalar>
std::optional<Hit<Scalar>> intersect_ray_segment(const RayT<Scalar>& ray,
                                                 const SegmentT<Scalar>& seg) {
  const Vector2<Scalar> e = seg.b - seg.a;
  const Scalar denom = cross2(ray.dir, e);
  const Scalar seg_len = e.norm();
  if (std::abs(denom) <= Scalar(1e-12) * seg_len) return std::nullopt;

  const Vector2<Scalar> w = seg.a - ray.origin;
  const Scalar t = cross2(w, e) / denom;
  const Scalar u = cross2(w, ray.dir) / denom;
  const Scalar u_eps = Scalar(kGeomEps) / seg_len;
  if (t <= Scalar(kRayEps) || u < -u_eps || u > Scalar(1) + u_eps) {
    return std::nullopt;
  }
  return Hit<Scalar>{t, ray.origin + t * ray.dir};
}

/// Reflection of p across the infinite line through seg.
template <typename Scalar>
Vector2<Scalar> mirror_point(const Vector2<Scalar>& p, const SegmentT<Scalar>& seg) {
  const Vector2<Scalar> d = (seg.b - seg.a).normalized();
  const Vector2<Scalar> rel = p - seg.a;
  const Vector2<Scalar> along = rel.dot(d) * d;
  return seg.a + Scalar(2) * along - rel;
}

/// d' = d - 2 (d.n) n
template <typename Scalar>
Vector2<Scalar> reflect_dir(const Vector2<Scalar>& dir, const Vector2<Scalar>& normal) {
  return dir - Scalar(2) * dir.dot(normal) * normal;
}

template <typename Scalar>
Vector2<Scalar> rotate_point(const Vector2<Scalar>& p, double angle_deg,
                             const Vector2<Scalar>& pivot) {
  const Eigen::Rotation2D<Scalar> rot(Scalar(deg_to_rad(angle_deg)));
  return pivot + rot * (p - pivot);
}

/// Counter-clockwise rotation of both endpoints about pivot.
template <typename Scalar>
SegmentT<Scalar> rotate_segment(const SegmentT<Scalar>& seg, double angle_deg,
                                const Vector2<Scalar>& pivot) {
  if (angle_deg == 0.0) return seg;
  return {rotate_point(seg.a, angle_deg, pivot), rotate_point(seg.b, angle_deg, pivot)};
}

/// Shortest distance from p to the closed segment.
template <typename Scalar>
Scalar distance_to_segment(const Vector2<Scalar>& p, const SegmentT<Scalar>& seg) {
  const Vector2<Scalar> e = seg.b - seg.a;
  const Scalar len2 = e.squaredNorm();
  Scalar u = (p - seg.a).dot(e) / len2;
  u = std::clamp(u, Scalar(0), Scalar(1));
  return (seg.a + u * e - p).norm();
}

/// True if the open segment p->q crosses seg strictly between its ends
/// (kRayEps away from p and q). Touching seg at p or q does not count.
template <typename Scalar>
bool segment_blocks(const Vector2<Scalar>& p, const Vector2<Scalar>& q,
                    const SegmentT<Scalar>& seg) {
  const Vector2<Scalar> d = q - p;
  const Scalar len = d.norm();
  if (len <= Scalar(kGeomEps)) return false;
  const RayT<Scalar> ray{p, d / len};
  const auto hit = intersect_ray_segment(ray, seg);
  return hit && hit->t < len - Scalar(kRayEps);
}

}  // namespace rissim

#endif  // RISSIM_GEOMETRY_HPP
