#include "mcvd/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mcvd/error.hpp"

namespace mcvd::analytic {

using geometry::AbsorbingSphere;
using geometry::ImageSet;
using geometry::Vec3;

namespace {

void check_rate_time(double t) {
  if (std::isnan(t) || t < 0.0) {
    throw Error(ErrorCode::NonPositiveTime, "time must be positive, got " + std::to_string(t));
  }
}

// coefficient * (path / t) / sqrt(4 pi D t) * exp(-path^2 / (4 D t))
double rate_term(double coefficient, double path, double t, double four_d) {
  const double four_dt = four_d * t;
  return coefficient * path / (t * std::sqrt(std::numbers::pi * four_dt)) *
         std::exp(-path * path / four_dt);
}

// coefficient * erfc(path / sqrt(4 D t)); the integral of rate_term over [0, t].
double cdf_term(double coefficient, double path, double t, double four_d) {
  return coefficient * std::erfc(path / std::sqrt(four_d * t));
}

struct PairTerms {
  double direct_coefficient;
  double direct_path;
  double stealing_coefficient;
  double stealing_path;
};

PairTerms pair_terms(const SimoPairParams& p) {
  p.validate();
  PairTerms out{p.r_i / p.r0_i, p.r0_i - p.r_i, 0.0, 0.0};
  if (p.r_j > 0.0) {
    const double r0_ij = effective_distance(p.r0_j, p.r_j, p.r0_i, p.phi);
    out.stealing_coefficient = p.r_j * p.r_i / (p.r0_j * r0_ij);
    out.stealing_path = (p.r0_j + r0_ij) - (p.r_j + p.r_i);
  }
  return out;
}

}  // namespace

void DiffusionParams::validate() const {
  if (!(D > 0.0) || !std::isfinite(D)) {
    throw Error(ErrorCode::InvalidParameter, "diffusion coefficient D must be > 0");
  }
}

void SisoParams::validate() const {
  diffusion.validate();
  if (!(r_r > 0.0) || !std::isfinite(r_r)) {
    throw Error(ErrorCode::InvalidParameter, "receiver radius r_r must be > 0");
  }
  if (!(r0 > r_r) || !std::isfinite(r0)) {
    throw Error(ErrorCode::InvalidParameter, "distance r0 must exceed receiver radius r_r");
  }
}

void SimoPairParams::validate() const {
  if (!(r_i > 0.0) || !(r_j >= 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "receiver radii must satisfy r_i > 0, r_j >= 0");
  }
  if (!(r0_i > r_i) || !(r0_j > r_j)) {
    throw Error(ErrorCode::InvalidParameter, "each distance r0 must exceed its receiver radius");
  }
  if (!(phi >= 0.0 && phi <= std::numbers::pi)) {
    throw Error(ErrorCode::InvalidParameter, "angular separation phi must lie in [0, pi]");
  }
}

double siso_hit_rate(double t, const SisoParams& p) {
  p.validate();
  check_rate_time(t);
  if (t == 0.0) {
    return 0.0;
  }
  return rate_term(p.r_r / p.r0, p.r0 - p.r_r, t, 4.0 * p.diffusion.D);
}

double siso_hit_cdf(double t, const SisoParams& p) {
  p.validate();
  if (!(t > 0.0)) {
    return 0.0;
  }
  return cdf_term(p.r_r / p.r0, p.r0 - p.r_r, t, 4.0 * p.diffusion.D);
}

double effective_distance(double r0_source, double r_source, double r0_target, double phi) {
  if (!(r0_source > r_source)) {
    throw Error(ErrorCode::InvalidParameter, "effective_distance requires r0_source > r_source");
  }
  const double shifted = r0_source - r_source * (r_source / r0_source);
  const double sq =
      shifted * shifted + r0_target * r0_target - 2.0 * shifted * r0_target * std::cos(phi);
  return std::sqrt(std::max(sq, 0.0));
}

double simo_hit_rate(double t, const SimoPairParams& p, const DiffusionParams& diffusion) {
  diffusion.validate();
  const PairTerms terms = pair_terms(p);
  check_rate_time(t);
  if (t == 0.0) {
    return 0.0;
  }
  const double four_d = 4.0 * diffusion.D;
  double rate = rate_term(terms.direct_coefficient, terms.direct_path, t, four_d);
  if (terms.stealing_coefficient != 0.0) {
    rate -= rate_term(terms.stealing_coefficient, terms.stealing_path, t, four_d);
  }
  return rate;
}

double simo_hit_rate_clamped(double t, const SimoPairParams& p, const DiffusionParams& diffusion) {
  return std::max(simo_hit_rate(t, p, diffusion), 0.0);
}

double simo_hit_cdf_raw(double t, const SimoPairParams& p, const DiffusionParams& diffusion) {
  diffusion.validate();
  const PairTerms terms = pair_terms(p);
  if (!(t > 0.0)) {
    return 0.0;
  }
  const double four_d = 4.0 * diffusion.D;
  double cdf = cdf_term(terms.direct_coefficient, terms.direct_path, t, four_d);
  if (terms.stealing_coefficient != 0.0) {
    cdf -= cdf_term(terms.stealing_coefficient, terms.stealing_path, t, four_d);
  }
  return cdf;
}

double simo_hit_cdf(double t, const SimoPairParams& p, const DiffusionParams& diffusion) {
  return std::clamp(simo_hit_cdf_raw(t, p, diffusion), 0.0, 1.0);
}

ImageSeriesModel::ImageSeriesModel(const ImageSet& images, const Vec3& tx,
                                   const DiffusionParams& diffusion)
    : four_d_(4.0 * diffusion.D) {
  diffusion.validate();
  const std::size_t n = images.spheres.size();
  if (n == 0) {
    throw Error(ErrorCode::InvalidParameter, "image series needs at least the real receiver");
  }
  const double r = images.spheres.front().radius;
  std::vector<double> r0(n);
  for (std::size_t i = 0; i < n; ++i) {
    r0[i] = geometry::distance(tx, images.spheres[i].center);
    if (!(r0[i] > r)) {
      throw Error(ErrorCode::InvalidParameter, "transmitter lies inside a receiver or image");
    }
  }
  direct_.reserve(n);
  stealing_.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    direct_.push_back({r / r0[i], r0[i] - r});
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) {
        continue;
      }
      const double phi =
          geometry::angular_separation(tx, images.spheres[i].center, images.spheres[j].center);
      const double r0_ij = effective_distance(r0[j], r, r0[i], phi);
      stealing_.push_back({r * r / (r0[j] * r0_ij), (r0[j] + r0_ij) - 2.0 * r});
    }
  }
}

double ImageSeriesModel::rate(double t) const {
  check_rate_time(t);
  if (t == 0.0) {
    return 0.0;
  }
  double sum = 0.0;
  for (const Term& term : direct_) {
    sum += rate_term(term.coefficient, term.path, t, four_d_);
  }
  for (const Term& term : stealing_) {
    sum -= rate_term(term.coefficient, term.path, t, four_d_);
  }
  return sum;
}

double ImageSeriesModel::cdf(double t) const {
  if (!(t > 0.0)) {
    return 0.0;
  }
  double sum = 0.0;
  for (const Term& term : direct_) {
    sum += cdf_term(term.coefficient, term.path, t, four_d_);
  }
  for (const Term& term : stealing_) {
    sum -= cdf_term(term.coefficient, term.path, t, four_d_);
  }
  return sum;
}

SisoModel::SisoModel(const SisoParams& p) : params_(p) { params_.validate(); }

namespace {

void check_valid_side(const geometry::Plane& plane, const Vec3& tx, const AbsorbingSphere& rx) {
  if (plane.signed_distance(tx) < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "transmitter lies behind the reflecting plane");
  }
  if (plane.signed_distance(rx.center) < rx.radius) {
    throw Error(ErrorCode::SphereIntersectsPlane,
                "receiver must lie on the valid side without touching the plane");
  }
}

}  // namespace

HalfSpaceModel::HalfSpaceModel(const HalfSpaceParams& p)
    : params_(p), image_(geometry::mirror_sphere(p.rx, p.plane)) {
  p.diffusion.validate();
  check_valid_side(p.plane, p.tx, p.rx);
  const double r0 = geometry::distance(p.tx, p.rx.center);
  if (!(r0 > p.rx.radius)) {
    throw Error(ErrorCode::InvalidParameter, "transmitter lies inside the receiver");
  }
  const double r_im = geometry::distance(p.tx, image_.center);
  const double phi = geometry::angular_separation(p.tx, p.rx.center, image_.center);
  const double r = p.rx.radius;
  toward_rx_ = SimoPairParams{r, r, r0, r_im, phi};
  toward_image_ = SimoPairParams{r, r, r_im, r0, phi};
}

double HalfSpaceModel::rate(double t) const {
  return simo_hit_rate(t, toward_rx_, params_.diffusion) +
         simo_hit_rate(t, toward_image_, params_.diffusion);
}

double HalfSpaceModel::cdf(double t) const {
  return simo_hit_cdf_raw(t, toward_rx_, params_.diffusion) +
         simo_hit_cdf_raw(t, toward_image_, params_.diffusion);
}

TwoPlaneModel::TwoPlaneModel(const TwoPlaneParams& p)
    : images_(geometry::generate_images_two_planes(p.rx, p.p1, p.p2, p.image_count, p.tx)),
      series_(images_, p.tx, p.diffusion) {
  if (p.p1.signed_distance(p.tx) < 0.0 || p.p2.signed_distance(p.tx) < 0.0) {
    throw Error(ErrorCode::InvalidParameter, "transmitter lies outside the slab");
  }
}

double TwoPlaneModel::cdf(double t) const { return std::clamp(series_.cdf(t), 0.0, 1.0); }

double halfspace_hit_rate(double t, const HalfSpaceParams& p) { return HalfSpaceModel(p).rate(t); }
double halfspace_hit_cdf(double t, const HalfSpaceParams& p) { return HalfSpaceModel(p).cdf(t); }
double two_plane_hit_rate(double t, const TwoPlaneParams& p) { return TwoPlaneModel(p).rate(t); }
double two_plane_hit_cdf_approx(double t, const TwoPlaneParams& p) {
  return TwoPlaneModel(p).cdf(t);
}

double ChannelModel::rate(double t) const {
  return std::visit([t](const auto& m) { return m.rate(t); }, model_);
}

double ChannelModel::rate_clamped(double t) const { return std::max(rate(t), 0.0); }

double ChannelModel::cdf(double t) const {
  return std::visit([t](const auto& m) { return m.cdf(t); }, model_);
}

std::string ChannelModel::name() const {
  struct Namer {
    std::string operator()(const SisoModel&) const { return "siso"; }
    std::string operator()(const HalfSpaceModel&) const { return "halfspace"; }
    std::string operator()(const TwoPlaneModel&) const { return "twoplane"; }
  };
  return std::visit(Namer{}, model_);
}

}  // namespace mcvd::analytic
