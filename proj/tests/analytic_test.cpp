#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mcvd/analytic.hpp"
#include "mcvd/error.hpp"
#include "quadrature.hpp"

using namespace mcvd;
using namespace mcvd::analytic;
using geometry::AbsorbingSphere;
using geometry::Plane;
using geometry::Vec3;

namespace {

// Frozen from tests/oracles/analytic_oracles.py (mpmath, 50 digits).
constexpr double kSisoRate_r010_rr5_t001 = 0.030189780053941823;
constexpr double kSisoCdf_r010sqrt2_rr5_t2 = 0.21494615810182254;
constexpr double kSimoRateTopo0_t005 = 0.04740021904577829;
constexpr double kSimoCdfTopo0_t005 = 0.00041609354212849522;
constexpr double kHalfSpaceCdfTopo2d1_t2 = 0.37425569157465566;
constexpr double kHalfSpaceCdfTopo0rr5_t1 = 0.31810043679398812;
constexpr double kTwoPlaneCdf_t2[] = {0.47198149585980023, 0.46914469703170019,
                                      0.4681150725494076};  // K' = 3, 5, 11

const DiffusionParams kD{79.4};

HalfSpaceParams topology0(double r_r) {
  return {{0, 0, 10}, {{10, 0, 0}, r_r}, Plane({0, 0, 0}, {1, 0, 0}), kD};
}

HalfSpaceParams topology2(double d) {
  return {{20, 0, 0}, {{10, 0, 0}, 5}, Plane({10 - 5 - d, 0, 0}, {1, 0, 0}), kD};
}

TwoPlaneParams two_plane(int k_prime) {
  return {{8, 0, 10}, {{8, 0, 0}, 5}, Plane({0, 0, 0}, {1, 0, 0}), Plane({16, 0, 0}, {-1, 0, 0}),
          k_prime, kD};
}

SimoPairParams topology0_pair() {
  const double r0 = 10 * std::numbers::sqrt2;
  return {5, 5, r0, r0, std::numbers::pi / 2};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no mcvd::Error thrown";
  return ErrorCode::ParseError;
}

}  // namespace

TEST(Siso, HighPrecisionRate) {
  EXPECT_NEAR(siso_hit_rate(0.01, {10, 5, kD}), kSisoRate_r010_rr5_t001,
              1e-13 * kSisoRate_r010_rr5_t001);
}

TEST(Siso, RateVanishesAtZero) {
  EXPECT_EQ(siso_hit_rate(0.0, {10, 5, kD}), 0.0);
  EXPECT_LT(siso_hit_rate(1e-4, {10, 5, kD}), 1e-30);
}

TEST(Siso, CdfEndpoints) {
  EXPECT_EQ(siso_hit_cdf(0.0, {10, 5, kD}), 0.0);
  // At t = 1e9 s the erfc argument is still 8.9e-6, so the gap to the limit is
  // (r_r/r0) erf(8.9e-6) = 5.0e-6; the limit itself is only reached further out.
  EXPECT_NEAR(siso_hit_cdf(1e9, {10, 5, kD}), 0.5 * std::erfc(5 / std::sqrt(4 * 79.4 * 1e9)),
              1e-15);
  EXPECT_NEAR(siso_hit_cdf(1e9, {10, 5, kD}), 0.5, 1e-5);
  EXPECT_NEAR(siso_hit_cdf(1e30, {10, 5, kD}), 0.5, 1e-12);
}

TEST(Siso, CdfMatchesQuadratureAndOracle) {
  const SisoParams p{10 * std::numbers::sqrt2, 5, kD};
  const double quad = oracle::integrate([&](double t) { return siso_hit_rate(t, p); }, 0, 2);
  EXPECT_NEAR(siso_hit_cdf(2.0, p), quad, 1e-6);
  EXPECT_NEAR(siso_hit_cdf(2.0, p), kSisoCdf_r010sqrt2_rr5_t2, 1e-14);
}

TEST(Siso, Errors) {
  EXPECT_EQ(code_of([] { siso_hit_cdf(1.0, {5, 5, kD}); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([] { siso_hit_cdf(1.0, {10, 5, {0.0}}); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([] { siso_hit_rate(-1.0, {10, 5, kD}); }), ErrorCode::NonPositiveTime);
}

TEST(EffectiveDistance, Examples) {
  const double a = 12 - 9.0 / 12;
  EXPECT_NEAR(effective_distance(12, 3, 7, std::numbers::pi / 2), std::sqrt(a * a + 49), 1e-12);
  const double phi = 0.7;
  EXPECT_NEAR(effective_distance(12, 1e-9, 7, phi),
              std::sqrt(144 + 49 - 2 * 12 * 7 * std::cos(phi)), 1e-9);
  EXPECT_NEAR(effective_distance(22, 5, 10, 0), 10.863636363636364, 1e-12);
}

TEST(Simo, VanishingCompetitorIsSiso) {
  const SimoPairParams p{4, 0, 13, 20, 0.3};
  for (double t : {0.01, 0.1, 0.5, 2.0}) {
    EXPECT_DOUBLE_EQ(simo_hit_rate(t, p, kD), siso_hit_rate(t, {13, 4, kD}));
    EXPECT_DOUBLE_EQ(simo_hit_cdf(t, p, kD), siso_hit_cdf(t, {13, 4, kD}));
  }
  const SimoPairParams tiny{4, 1e-12, 13, 20, 0.3};
  EXPECT_NEAR(simo_hit_cdf(2.0, tiny, kD), siso_hit_cdf(2.0, {13, 4, kD}), 1e-12);
}

TEST(Simo, SymmetricPairGivesIdenticalRates) {
  const SimoPairParams i{4, 4, 15, 15, 1.1};
  const SimoPairParams j{i.r_j, i.r_i, i.r0_j, i.r0_i, i.phi};
  for (double t = 0.01; t <= 2.0; t += 0.07) {
    EXPECT_DOUBLE_EQ(simo_hit_rate(t, i, kD), simo_hit_rate(t, j, kD));
  }
}

TEST(Simo, HighPrecisionTopology0) {
  const auto p = topology0_pair();
  EXPECT_NEAR(simo_hit_rate(0.05, p, kD), kSimoRateTopo0_t005, 1e-12 * kSimoRateTopo0_t005);
  EXPECT_NEAR(simo_hit_cdf(0.05, p, kD), kSimoCdfTopo0_t005, 1e-12 * kSimoCdfTopo0_t005);
  EXPECT_EQ(simo_hit_cdf(0.0, p, kD), 0.0);
}

TEST(Simo, StealingNeverIncreasesAbsorption) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> radius(1, 8), gap(0.5, 20), angle(0, std::numbers::pi);
  for (int n = 0; n < 200; ++n) {
    const double ri = radius(gen);
    const double rj = radius(gen);
    const SimoPairParams p{ri, rj, ri + gap(gen), rj + gap(gen), angle(gen)};
    for (double t : {0.05, 0.5, 2.0}) {
      EXPECT_LE(simo_hit_cdf(t, p, kD), siso_hit_cdf(t, {p.r0_i, p.r_i, kD}));
    }
  }
}

TEST(Simo, EclipsedPairDipsBelowZeroButSumStaysMonotone) {
  // Topology 2, d=1: the image sits straight behind the receiver seen from Tx
  const HalfSpaceModel m(topology2(1));
  const auto& image = m.toward_image();
  EXPECT_LT(simo_hit_cdf_raw(0.05, image, kD), 0.0);
  EXPECT_EQ(simo_hit_cdf(0.05, image, kD), 0.0);
  double prev = 0.0;
  for (int k = 1; k <= 2000; ++k) {
    const double t = k * 1e-3;
    EXPECT_DOUBLE_EQ(m.cdf(t), simo_hit_cdf_raw(t, m.toward_receiver(), kD) +
                                   simo_hit_cdf_raw(t, image, kD));
    ASSERT_GE(m.cdf(t), prev);
    prev = m.cdf(t);
  }
}

TEST(Simo, Errors) {
  EXPECT_EQ(code_of([] { simo_hit_cdf(1, {5, 5, 4, 10, 0}, kD); }), ErrorCode::InvalidParameter);
  EXPECT_EQ(code_of([] { simo_hit_cdf(1, {5, 5, 10, 10, 4.0}, kD); }),
            ErrorCode::InvalidParameter);
}

TEST(HalfSpace, HighPrecisionValues) {
  EXPECT_NEAR(halfspace_hit_cdf(2.0, topology2(1)), kHalfSpaceCdfTopo2d1_t2, 1e-13);
  EXPECT_NEAR(halfspace_hit_cdf(1.0, topology0(5)), kHalfSpaceCdfTopo0rr5_t1, 1e-13);
  EXPECT_EQ(halfspace_hit_cdf(0.0, topology2(1)), 0.0);
}

TEST(HalfSpace, ImageIsMirroredReceiver) {
  const HalfSpaceModel m(topology2(1));
  EXPECT_NEAR(m.image().center.x, -2.0, 1e-12);
  EXPECT_NEAR(m.toward_image().r0_i, 22.0, 1e-12);
  EXPECT_NEAR(m.toward_receiver().phi, 0.0, 1e-12);
}

TEST(HalfSpace, PlaneAtInfinityIsSiso) {
  const SisoParams siso{10, 5, kD};
  const HalfSpaceParams far{{20, 0, 0}, {{10, 0, 0}, 5}, Plane({-1e7, 0, 0}, {1, 0, 0}), kD};
  for (double t = 0.001; t <= 2.0; t += 0.001) {
    ASSERT_NEAR(halfspace_hit_cdf(t, far), siso_hit_cdf(t, siso), 1e-6) << t;
  }
}

TEST(HalfSpace, InvariantUnderRigidMotion) {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(-100, 100);
  HalfSpaceParams base = topology2(1);
  base.tx = {20, 3, 5};
  for (int trial = 0; trial < 50; ++trial) {
    // random rotation from a normalized quaternion
    double q[4] = {n(gen), n(gen), n(gen), n(gen)};
    const double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    for (double& c : q) c /= qn;
    const auto [w, x, y, z] = q;
    const auto rotate = [&](const Vec3& v) {
      return Vec3{(1 - 2 * (y * y + z * z)) * v.x + 2 * (x * y - z * w) * v.y + 2 * (x * z + y * w) * v.z,
                  2 * (x * y + z * w) * v.x + (1 - 2 * (x * x + z * z)) * v.y + 2 * (y * z - x * w) * v.z,
                  2 * (x * z - y * w) * v.x + 2 * (y * z + x * w) * v.y + (1 - 2 * (x * x + y * y)) * v.z};
    };
    const Vec3 shift{u(gen), u(gen), u(gen)};
    const HalfSpaceParams moved{rotate(base.tx) + shift,
                                {rotate(base.rx.center) + shift, base.rx.radius},
                                Plane(rotate(base.plane.point()) + shift, rotate(base.plane.normal())),
                                kD};
    for (double t : {0.01, 0.1, 0.5, 1.0, 2.0}) {
      EXPECT_NEAR(halfspace_hit_cdf(t, moved), halfspace_hit_cdf(t, base), 1e-9);
    }
  }
}

TEST(HalfSpace, Errors) {
  EXPECT_EQ(code_of([] {
              halfspace_hit_cdf(1, {{20, 0, 0}, {{10, 0, 0}, 5}, Plane({7, 0, 0}, {1, 0, 0}), kD});
            }),
            ErrorCode::SphereIntersectsPlane);
}

TEST(TwoPlane, NoImagesIsSiso) {
  const auto p = two_plane(0);
  const SisoParams siso{10, 5, kD};
  for (double t : {0.01, 0.3, 2.0}) {
    EXPECT_DOUBLE_EQ(two_plane_hit_rate(t, p), siso_hit_rate(t, siso));
    EXPECT_DOUBLE_EQ(two_plane_hit_cdf_approx(t, p), siso_hit_cdf(t, siso));
  }
}

TEST(TwoPlane, DistantPlanesAreSiso) {
  const TwoPlaneParams p{{8, 0, 10}, {{8, 0, 0}, 5}, Plane({-1e9, 0, 0}, {1, 0, 0}),
                         Plane({1e9, 0, 0}, {-1, 0, 0}), 11, kD};
  const SisoParams siso{10, 5, kD};
  for (double t = 0.01; t <= 2.0; t += 0.01) {
    ASSERT_NEAR(two_plane_hit_rate(t, p), siso_hit_rate(t, siso), 1e-9);
  }
}

TEST(TwoPlane, HighPrecisionValues) {
  const int ks[] = {3, 5, 11};
  for (int n = 0; n < 3; ++n) {
    EXPECT_NEAR(two_plane_hit_cdf_approx(2.0, two_plane(ks[n])), kTwoPlaneCdf_t2[n], 1e-13)
        << "K'=" << ks[n];
  }
}

TEST(TwoPlane, TruncationConvergesGeometrically) {
  double prev_step = std::numeric_limits<double>::infinity();
  double prev = two_plane_hit_cdf_approx(2.0, two_plane(1));
  for (int k = 3; k <= 15; k += 2) {
    const double value = two_plane_hit_cdf_approx(2.0, two_plane(k));
    const double step = std::abs(value - prev);
    EXPECT_LT(step, prev_step) << "K'=" << k;
    prev_step = step;
    prev = value;
  }
  EXPECT_LT(prev_step, 1e-3);
}

TEST(AllModels, RateIntegratesToCdf) {
  std::vector<ChannelModel> models;
  models.emplace_back(SisoModel({10 * std::numbers::sqrt2, 5, kD}));
  for (double r : {3.0, 5.0, 8.0}) models.emplace_back(HalfSpaceModel(topology0(r)));
  for (double d : {1.0, 3.0, 5.0}) models.emplace_back(HalfSpaceModel(topology2(d)));
  for (int k : {3, 5, 11}) models.emplace_back(TwoPlaneModel(two_plane(k)));
  for (const auto& m : models) {
    double t0 = 0.0;
    double acc = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double t1 = 0.1 * k;
      acc += oracle::integrate([&](double t) { return m.rate(t); }, t0, t1);
      t0 = t1;
      EXPECT_NEAR(acc, m.cdf(t1), 1e-8) << m.name() << " t=" << t1;
    }
  }
}

TEST(AllModels, MonotoneAndBounded) {
  std::vector<ChannelModel> models;
  for (double r : {3.0, 5.0, 8.0}) models.emplace_back(HalfSpaceModel(topology0(r)));
  for (double d : {1.0, 3.0, 5.0}) models.emplace_back(HalfSpaceModel(topology2(d)));
  for (int k : {3, 5, 11}) models.emplace_back(TwoPlaneModel(two_plane(k)));
  for (const auto& m : models) {
    double prev = 0.0;
    for (int k = 0; k <= 2000; ++k) {
      const double v = m.cdf(k * 1e-3);
      ASSERT_GE(v, prev) << m.name();
      ASSERT_LE(v, 1.0);
      prev = v;
    }
  }
}

TEST(ChannelModel, Names) {
  EXPECT_EQ(ChannelModel(SisoModel({10, 5, kD})).name(), "siso");
  EXPECT_EQ(ChannelModel(HalfSpaceModel(topology2(3))).name(), "halfspace");
  EXPECT_EQ(ChannelModel(TwoPlaneModel(two_plane(3))).name(), "twoplane");
}
