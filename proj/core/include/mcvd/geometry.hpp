#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace mcvd::geometry {

/// Position or displacement, micrometers.
struct Vec3 {
  double x{0.0};
  double y{0.0};
  double z{0.0};

  constexpr Vec3 operator+(const Vec3& o) const noexcept { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const noexcept { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const noexcept { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const noexcept { return {x * s, y * s, z * s}; }
  constexpr Vec3& operator+=(const Vec3& o) noexcept {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const noexcept = default;

  bool is_finite() const noexcept {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

constexpr Vec3 operator*(double s, const Vec3& v) noexcept { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) noexcept {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
constexpr Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) noexcept { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) noexcept { return norm(a - b); }

/// Returns v scaled to unit length. Throws DegenerateGeometry for a zero or
/// non-finite vector.
Vec3 normalized(const Vec3& v);

/// Infinite reflecting plane. The normal points into the valid domain, so a
/// point is admissible iff its signed distance is >= 0.
class Plane {
 public:
  /// The normal is normalized on construction.
  Plane(const Vec3& point, const Vec3& normal);

  const Vec3& point() const noexcept { return point_; }
  const Vec3& normal() const noexcept { return normal_; }

  double signed_distance(const Vec3& p) const noexcept { return dot(p - point_, normal_); }

 private:
  Vec3 point_;
  Vec3 normal_;
};

/// Finite rectangular reflector (a thin layer, reflective on both faces).
class Rect {
 public:
  /// Both axes are normalized; u_axis must lie in the plane (|u.n| <= 1e-9)
  /// and v = normal x u. half_u and half_v must be positive.
  Rect(const Vec3& center, const Vec3& normal, const Vec3& u_axis, double half_u,
       double half_v);

  const Vec3& center() const noexcept { return center_; }
  const Vec3& normal() const noexcept { return normal_; }
  const Vec3& u_axis() const noexcept { return u_axis_; }
  const Vec3& v_axis() const noexcept { return v_axis_; }
  double half_u() const noexcept { return half_u_; }
  double half_v() const noexcept { return half_v_; }

  double signed_distance(const Vec3& p) const noexcept { return dot(p - center_, normal_); }
  /// Whether a point on the supporting plane lies within the rectangle.
  bool contains_projection(const Vec3& p) const noexcept;
  /// Euclidean distance from p to the closed rectangle.
  double distance_to(const Vec3& p) const noexcept;
  /// The supporting plane, oriented along the rectangle normal.
  Plane supporting_plane() const { return Plane(center_, normal_); }

 private:
  Vec3 center_;
  Vec3 normal_;
  Vec3 u_axis_;
  Vec3 v_axis_;
  double half_u_;
  double half_v_;
};

using Reflector = std::variant<Plane, Rect>;

/// Fully absorbing spherical receiver.
struct AbsorbingSphere {
  Vec3 center;
  double radius{0.0};

  /// Throws InvalidParameter when radius <= 0 or the center is not finite.
  void validate() const;
};

/// Real receiver (index 0) followed by its mirror images.
struct ImageSet {
  std::vector<AbsorbingSphere> spheres;
  std::vector<double> distances_from_tx;
  /// For each sphere, the reflections applied to the real receiver to build
  /// it, in application order (0 = first plane, 1 = second plane).
  std::vector<std::vector<int>> reflection_chains;
};

struct SegmentHit {
  double s{0.0};
  Vec3 point;
};

Vec3 mirror_point(const Vec3& p, const Plane& plane) noexcept;

/// Mirror of a receiver across a plane. Throws SphereIntersectsPlane when the
/// sphere reaches the plane.
AbsorbingSphere mirror_sphere(const AbsorbingSphere& s, const Plane& plane);

/// Angle in [0, pi] between (c_i - tx) and (c_j - tx). Throws
/// DegenerateGeometry when tx coincides with either center.
double angular_separation(const Vec3& tx, const Vec3& c_i, const Vec3& c_j);

/// Real receiver plus the `image_count` nearest images of the parallel-mirror
/// lattice formed by p1 and p2, sorted by distance from the real center. Ties
/// put the image on the side p1's normal points to first.
ImageSet generate_images_two_planes(const AbsorbingSphere& rx, const Plane& p1, const Plane& p2,
                                    int image_count, const Vec3& tx);

/// Crossing of segment a->b with a reflector. For a Plane only crossings from
/// the valid side into the invalid side count; a Rect is two-sided and only
/// reports crossings inside its bounds.
std::optional<SegmentHit> segment_boundary_hit(const Vec3& a, const Vec3& b, const Plane& plane) noexcept;
std::optional<SegmentHit> segment_boundary_hit(const Vec3& a, const Vec3& b, const Rect& rect) noexcept;
std::optional<SegmentHit> segment_boundary_hit(const Vec3& a, const Vec3& b,
                                               const Reflector& reflector) noexcept;

/// Earliest point where segment a->b enters the ball. s = 0 if a is inside.
std::optional<SegmentHit> segment_sphere_entry(const Vec3& a, const Vec3& b,
                                               const AbsorbingSphere& sphere) noexcept;

/// Reflection across the reflector's supporting plane.
Vec3 mirror_point(const Vec3& p, const Reflector& reflector) noexcept;

/// Distance from p to the reflector surface (unsigned).
double distance_to(const Vec3& p, const Reflector& reflector) noexcept;

}  // namespace mcvd::geometry
