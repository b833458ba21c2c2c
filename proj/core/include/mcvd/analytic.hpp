#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mcvd/geometry.hpp"

namespace mcvd::analytic {

/// Diffusion coefficient, um^2/s.
struct DiffusionParams {
  double D{79.4};
  void validate() const;
};

/// Point transmitter and one absorbing sphere in unbounded space.
struct SisoParams {
  double r0{0.0};   ///< center-to-center Tx-Rx distance, um
  double r_r{0.0};  ///< receiver radius, um
  DiffusionParams diffusion;
  void validate() const;
};

/// Receiver i in the presence of a competing receiver j.
struct SimoPairParams {
  double r_i{0.0};
  double r_j{0.0};
  double r0_i{0.0};
  double r0_j{0.0};
  double phi{0.0};  ///< angle between the two receivers seen from Tx, radians
  void validate() const;
};

struct HalfSpaceParams {
  geometry::Vec3 tx;
  geometry::AbsorbingSphere rx;
  geometry::Plane plane;
  DiffusionParams diffusion;
};

struct TwoPlaneParams {
  geometry::Vec3 tx;
  geometry::AbsorbingSphere rx;
  geometry::Plane p1;
  geometry::Plane p2;
  int image_count{11};  ///< images kept besides the real receiver (K')
  DiffusionParams diffusion;
};

double siso_hit_rate(double t, const SisoParams& p);
double siso_hit_cdf(double t, const SisoParams& p);

/// Distance from the competitor-shifted source point to the target center:
/// the source center is pulled toward Tx by r_source^2 / r0_source and the
/// law of cosines is applied with angle phi.
double effective_distance(double r0_source, double r_source, double r0_target, double phi);

/// Absorption rate of receiver i minus the first-order stealing correction
/// of receiver j. May be negative at small t; see simo_hit_rate_clamped.
double simo_hit_rate(double t, const SimoPairParams& p, const DiffusionParams& diffusion);
double simo_hit_rate_clamped(double t, const SimoPairParams& p, const DiffusionParams& diffusion);

/// Time integral of simo_hit_rate from 0 to t. When receiver j eclipses
/// receiver i as seen from Tx the correction can outweigh the direct term, so
/// the raw value may dip below zero.
double simo_hit_cdf_raw(double t, const SimoPairParams& p, const DiffusionParams& diffusion);
/// simo_hit_cdf_raw clamped to [0, 1].
double simo_hit_cdf(double t, const SimoPairParams& p, const DiffusionParams& diffusion);

/// Closed-form response of a sum of mutually stealing image receivers. All
/// receivers share one radius; the observable absorption is the sum over the
/// real receiver and all images.
class ImageSeriesModel {
 public:
  ImageSeriesModel(const geometry::ImageSet& images, const geometry::Vec3& tx,
                   const DiffusionParams& diffusion);

  double rate(double t) const;
  double cdf(double t) const;

  std::size_t receiver_count() const noexcept { return direct_.size(); }

 private:
  struct Term {
    double coefficient;
    double path;
  };
  std::vector<Term> direct_;
  std::vector<Term> stealing_;
  double four_d_;
};

class SisoModel {
 public:
  explicit SisoModel(const SisoParams& p);
  double rate(double t) const { return siso_hit_rate(t, params_); }
  double cdf(double t) const { return siso_hit_cdf(t, params_); }
  const SisoParams& params() const noexcept { return params_; }

 private:
  SisoParams params_;
};

/// Receiver near one infinite reflecting plane: the receiver and its mirror
/// image treated as a two-receiver system in unbounded space.
class HalfSpaceModel {
 public:
  explicit HalfSpaceModel(const HalfSpaceParams& p);

  double rate(double t) const;
  double cdf(double t) const;

  const geometry::AbsorbingSphere& image() const noexcept { return image_; }
  /// Pair parameters of the real receiver against its image, and vice versa.
  const SimoPairParams& toward_receiver() const noexcept { return toward_rx_; }
  const SimoPairParams& toward_image() const noexcept { return toward_image_; }

 private:
  HalfSpaceParams params_;
  geometry::AbsorbingSphere image_;
  SimoPairParams toward_rx_;
  SimoPairParams toward_image_;
};

/// Receiver between two parallel reflecting planes, truncated to the real
/// receiver plus `image_count` nearest images.
class TwoPlaneModel {
 public:
  explicit TwoPlaneModel(const TwoPlaneParams& p);

  double rate(double t) const { return series_.rate(t); }
  /// Truncated series clamped to [0, 1].
  double cdf(double t) const;

  const geometry::ImageSet& images() const noexcept { return images_; }

 private:
  geometry::ImageSet images_;
  ImageSeriesModel series_;
};

double halfspace_hit_rate(double t, const HalfSpaceParams& p);
double halfspace_hit_cdf(double t, const HalfSpaceParams& p);
double two_plane_hit_rate(double t, const TwoPlaneParams& p);
double two_plane_hit_cdf_approx(double t, const TwoPlaneParams& p);

/// Any closed-form response, as used by the experiment harness.
class ChannelModel {
 public:
  using Variant = std::variant<SisoModel, HalfSpaceModel, TwoPlaneModel>;

  explicit ChannelModel(Variant model) : model_(std::move(model)) {}

  double rate(double t) const;
  /// Raw rate clamped at zero, for reporting.
  double rate_clamped(double t) const;
  double cdf(double t) const;
  std::string name() const;

  const Variant& variant() const noexcept { return model_; }

 private:
  Variant model_;
};

}  // namespace mcvd::analytic
