#include "mcvd/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "mcvd/error.hpp"

namespace mcvd {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::SphereIntersectsPlane: return "SphereIntersectsPlane";
    case ErrorCode::PlanesNotParallel: return "PlanesNotParallel";
    case ErrorCode::SphereOutsideSlab: return "SphereOutsideSlab";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NonPositiveTime: return "NonPositiveTime";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ReceiverUnknown: return "ReceiverUnknown";
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace mcvd

namespace mcvd::geometry {

namespace {

constexpr double kParallelTolerance = 1e-9;

}  // namespace

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::DegenerateGeometry, "cannot normalize a zero or non-finite vector");
  }
  return v * (1.0 / n);
}

Plane::Plane(const Vec3& point, const Vec3& normal) : point_(point), normal_(normalized(normal)) {
  if (!point.is_finite()) {
    throw Error(ErrorCode::DegenerateGeometry, "plane point must be finite");
  }
}

Rect::Rect(const Vec3& center, const Vec3& normal, const Vec3& u_axis, double half_u,
           double half_v)
    : center_(center),
      normal_(normalized(normal)),
      u_axis_(normalized(u_axis)),
      half_u_(half_u),
      half_v_(half_v) {
  if (!center.is_finite()) {
    throw Error(ErrorCode::DegenerateGeometry, "rect center must be finite");
  }
  if (std::abs(dot(normal_, u_axis_)) > kParallelTolerance) {
    throw Error(ErrorCode::DegenerateGeometry, "rect u_axis must be orthogonal to its normal");
  }
  if (!(half_u > 0.0) || !(half_v > 0.0) || !std::isfinite(half_u) || !std::isfinite(half_v)) {
    throw Error(ErrorCode::InvalidParameter, "rect half extents must be positive");
  }
  v_axis_ = cross(normal_, u_axis_);
}

bool Rect::contains_projection(const Vec3& p) const noexcept {
  const Vec3 rel = p - center_;
  return std::abs(dot(rel, u_axis_)) <= half_u_ && std::abs(dot(rel, v_axis_)) <= half_v_;
}

double Rect::distance_to(const Vec3& p) const noexcept {
  const Vec3 rel = p - center_;
  const double du = std::max(std::abs(dot(rel, u_axis_)) - half_u_, 0.0);
  const double dv = std::max(std::abs(dot(rel, v_axis_)) - half_v_, 0.0);
  const double dn = dot(rel, normal_);
  return std::sqrt(du * du + dv * dv + dn * dn);
}

void AbsorbingSphere::validate() const {
  if (!center.is_finite()) {
    throw Error(ErrorCode::InvalidParameter, "receiver center must be finite");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidParameter, "receiver radius must be positive");
  }
}

Vec3 mirror_point(const Vec3& p, const Plane& plane) noexcept {
  return p - plane.normal() * (2.0 * plane.signed_distance(p));
}

Vec3 mirror_point(const Vec3& p, const Reflector& reflector) noexcept {
  return std::visit(
      [&](const auto& r) -> Vec3 {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Plane>) {
          return mirror_point(p, r);
        } else {
          return p - r.normal() * (2.0 * r.signed_distance(p));
        }
      },
      reflector);
}

double distance_to(const Vec3& p, const Reflector& reflector) noexcept {
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Plane>) {
          return std::abs(r.signed_distance(p));
        } else {
          return r.distance_to(p);
        }
      },
      reflector);
}

AbsorbingSphere mirror_sphere(const AbsorbingSphere& s, const Plane& plane) {
  s.validate();
  if (std::abs(plane.signed_distance(s.center)) < s.radius) {
    throw Error(ErrorCode::SphereIntersectsPlane, "receiver crosses the mirror plane");
  }
  return AbsorbingSphere{mirror_point(s.center, plane), s.radius};
}

double angular_separation(const Vec3& tx, const Vec3& c_i, const Vec3& c_j) {
  const Vec3 u = c_i - tx;
  const Vec3 v = c_j - tx;
  if (dot(u, u) == 0.0 || dot(v, v) == 0.0) {
    throw Error(ErrorCode::DegenerateGeometry, "transmitter coincides with a receiver center");
  }
  return std::atan2(norm(cross(u, v)), dot(u, v));
}

ImageSet generate_images_two_planes(const AbsorbingSphere& rx, const Plane& p1, const Plane& p2,
                                    int image_count, const Vec3& tx) {
  rx.validate();
  if (image_count < 0) {
    throw Error(ErrorCode::InvalidParameter, "image count must be non-negative");
  }
  if (norm(cross(p1.normal(), p2.normal())) > kParallelTolerance) {
    throw Error(ErrorCode::PlanesNotParallel, "reflecting planes are not parallel");
  }
  if (dot(p1.normal(), p2.normal()) > 0.0) {
    throw Error(ErrorCode::SphereOutsideSlab, "plane normals must face each other");
  }
  if (p1.signed_distance(rx.center) < rx.radius || p2.signed_distance(rx.center) < rx.radius) {
    throw Error(ErrorCode::SphereOutsideSlab, "receiver is not strictly inside the slab");
  }

  const std::array<const Plane*, 2> planes{&p1, &p2};
  struct Candidate {
    Vec3 center;
    double dist;
    double along_normal;
    std::vector<int> chain;
  };
  std::vector<Candidate> candidates;
  // Each alternating reflection word gives a distinct lattice point; within a
  // word family the distance grows with length, so words up to length
  // image_count cover the image_count nearest images.
  for (int first = 0; first < 2; ++first) {
    Vec3 c = rx.center;
    std::vector<int> chain;
    int plane = first;
    for (int len = 1; len <= image_count; ++len) {
      c = mirror_point(c, *planes[plane]);
      chain.push_back(plane);
      const Vec3 offset = c - rx.center;
      candidates.push_back({c, norm(offset), dot(offset, p1.normal()), chain});
      plane = 1 - plane;
    }
  }
  // Distances are compared on a 1e-6 um grid so mirror-symmetric images
  // that differ only by rounding count as ties.
  const auto key = [](const Candidate& c) { return std::llround(c.dist * 1e6); };
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const Candidate& a, const Candidate& b) {
                     const auto ka = key(a);
                     const auto kb = key(b);
                     if (ka != kb) {
                       return ka < kb;
                     }
                     return a.along_normal > b.along_normal;
                   });

  ImageSet out;
  out.spheres.push_back(rx);
  out.distances_from_tx.push_back(distance(tx, rx.center));
  out.reflection_chains.emplace_back();
  for (int k = 0; k < image_count; ++k) {
    const auto& cand = candidates[static_cast<std::size_t>(k)];
    out.spheres.push_back(AbsorbingSphere{cand.center, rx.radius});
    out.distances_from_tx.push_back(distance(tx, cand.center));
    out.reflection_chains.push_back(cand.chain);
  }
  return out;
}

std::optional<SegmentHit> segment_boundary_hit(const Vec3& a, const Vec3& b,
                                               const Plane& plane) noexcept {
  const double sa = plane.signed_distance(a);
  const double sb = plane.signed_distance(b);
  if (!(sa >= 0.0 && sb < 0.0)) {
    return std::nullopt;
  }
  const double s = sa / (sa - sb);
  return SegmentHit{s, a + (b - a) * s};
}

std::optional<SegmentHit> segment_boundary_hit(const Vec3& a, const Vec3& b,
                                               const Rect& rect) noexcept {
  const double sa = rect.signed_distance(a);
  const double sb = rect.signed_distance(b);
  const bool crosses = (sa > 0.0 && sb <= 0.0) || (sa < 0.0 && sb >= 0.0);
  if (!crosses) {
    return std::nullopt;
  }
  const double s = sa / (sa - sb);
  const Vec3 point = a + (b - a) * s;
  if (!rect.contains_projection(point)) {
    return std::nullopt;
  }
  return SegmentHit{s, point};
}

std::optional<SegmentHit> segment_boundary_hit(const Vec3& a, const Vec3& b,
                                               const Reflector& reflector) noexcept {
  return std::visit([&](const auto& r) { return segment_boundary_hit(a, b, r); }, reflector);
}

std::optional<SegmentHit> segment_sphere_entry(const Vec3& a, const Vec3& b,
                                               const AbsorbingSphere& sphere) noexcept {
  const Vec3 f = a - sphere.center;
  const double c = dot(f, f) - sphere.radius * sphere.radius;
  if (c <= 0.0) {
    return SegmentHit{0.0, a};
  }
  const Vec3 d = b - a;
  const double half_b = dot(f, d);
  if (half_b >= 0.0) {
    return std::nullopt;  // moving away or tangentially
  }
  const double aa = dot(d, d);
  const double disc = half_b * half_b - aa * c;
  if (disc < 0.0) {
    return std::nullopt;
  }
  // Stable smaller root: c / q with q = -half_b + sqrt(disc).
  const double q = -half_b + std::sqrt(disc);
  const double s = c / q;
  if (s > 1.0) {
    return std::nullopt;
  }
  return SegmentHit{s, a + d * s};
}

}  // namespace mcvd::geometry
