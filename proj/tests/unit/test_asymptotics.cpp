#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "rwm/asymptotics.hpp"
#include "rwm/error.hpp"
#include "rwm/special_functions.hpp"

using namespace rwm;

TEST(Theta, PointMass) {
  const auto one = MixingDistribution::point_mass();
  EXPECT_NEAR(theta(one, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(theta(one, -1.19), gaussian_cdf(-1.19), 1e-15);
  EXPECT_NEAR(theta(MixingDistribution::point_mass(2.0), -1.0), 0.30853753872598688, 1e-12);
}

TEST(Theta, Symmetry) {
  for (const auto& R : {MixingDistribution::half_normal(), MixingDistribution::exponential(),
                        MixingDistribution::lognormal()}) {
    for (double x : {0.1, 0.7, 2.0, 10.0}) EXPECT_NEAR(theta(R, x) + theta(R, -x), 1.0, 1e-9) << R.label();
  }
}

TEST(Theta, PointMassAtZeroRejected) {
  EXPECT_THROW(MixingDistribution::from_samples({1e-9, 1e-8, 1e-9, 1.0}), PointMassAtZero);
  EXPECT_THROW(MixingDistribution::from_samples({1.0, -0.5}), InvalidParameter);
}

TEST(Limits, ShellValues) {
  const auto one = MixingDistribution::point_mass();
  EXPECT_NEAR(limit_ear(one, 1.19), 2.0 * gaussian_cdf(-1.19), 1e-15);
  EXPECT_NEAR(limit_ear(one, 1.19), 0.2340, 1e-4);
  EXPECT_NEAR(limit_esjd(one, 1.19), 0.3314, 1e-4);
  EXPECT_DOUBLE_EQ(limit_ear(one, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(limit_esjd(one, 0.0), 0.0);
}

TEST(Limits, GeneralProposal) {
  const auto one = MixingDistribution::point_mass();
  const auto two = MixingDistribution::point_mass(2.0);
  const auto hn = MixingDistribution::half_normal();
  EXPECT_NEAR(limit_ear_general(hn, one, 1.3).value, limit_ear(hn, 1.3), 1e-9);
  EXPECT_NEAR(limit_esjd_general(hn, one, 1.3).value, limit_esjd(hn, 1.3), 1e-9);
  EXPECT_NEAR(limit_ear_general(one, two, 0.595).value, limit_ear(one, 1.19), 1e-12);
  EXPECT_NEAR(limit_ear_general(hn, two, 0.0).value, 1.0, 1e-12);
  EXPECT_NEAR(limit_esjd_general(hn, two, 0.0).value, 0.0, 1e-12);
}

TEST(Aots, ReferenceOptima) {
  struct Case {
    MixingDistribution R;
    double mu;
    double aoa;
  };
  const std::vector<Case> cases = {
      {MixingDistribution::point_mass(), 1.19060124834277, 0.233810161331837},
      {MixingDistribution::half_normal(), 1.67034692917934, 0.0913617756696373},
      {MixingDistribution::exponential(), 2.85185745599258, 0.0553611622900873},
  };
  for (const auto& c : cases) {
    const auto o = solve_aots(c.R);
    ASSERT_TRUE(o.finite) << c.R.label();
    EXPECT_NEAR(o.mu_hat, c.mu, 1e-8) << c.R.label();
    EXPECT_NEAR(o.aoa, c.aoa, 1e-9) << c.R.label();
    EXPECT_LT(std::fabs(o.residual), 1e-8);
    EXPECT_NEAR(o.limit_esjd_at_mu_hat, limit_esjd(c.R, o.mu_hat), 1e-12);
  }
}

TEST(Aots, ShellArgmaxAgreesWithGridSearch) {
  const auto o = solve_aots(MixingDistribution::point_mass());
  double best = 0.0, arg = 0.0;
  for (double mu = 0.5; mu < 2.5; mu += 1e-5) {
    const double v = 2.0 * mu * mu * gaussian_cdf(-mu);
    if (v > best) best = v, arg = mu;
  }
  EXPECT_NEAR(o.mu_hat, arg, 1e-4);
  EXPECT_NEAR(shell_optimal_mu(), o.mu_hat, 1e-10);
  EXPECT_NEAR(shell_optimal_acceptance(), o.aoa, 1e-12);
}

TEST(Aots, ScaleEquivariance) {
  const auto base = solve_aots(MixingDistribution::exponential());
  for (double c : {0.5, 2.0}) {
    const auto o = solve_aots(MixingDistribution::exponential().scaled(c));
    EXPECT_NEAR(o.mu_hat / base.mu_hat, c, 1e-6);
    EXPECT_NEAR(o.aoa, base.aoa, 1e-6);
  }
}

TEST(Aots, TwoPointMixtureBelowBound) {
  const auto R = MixingDistribution::atoms({0.5, 2.0}, {1.0, 1.0});
  const auto o = solve_aots(R);
  ASSERT_TRUE(o.finite);
  EXPECT_NEAR(o.mu_hat, 2.38106933993534, 1e-7);
  EXPECT_LT(o.aoa, 0.234);
  double best = 0.0, arg = 0.0;
  for (double mu = 0.01; mu < 20.0; mu *= 1.0001) {
    const double v = limit_esjd(R, mu);
    if (v > best) best = v, arg = mu;
  }
  EXPECT_NEAR(o.mu_hat / arg, 1.0, 2e-4);
}

TEST(Aots, LognormalLimitHasFiniteRoot) {
  const auto o = solve_aots(MixingDistribution::lognormal());
  ASSERT_TRUE(o.finite);
  EXPECT_NEAR(o.mu_hat, 19.3242413017911, 1e-5);
  EXPECT_NEAR(o.aoa, 0.0243917550026267, 1e-7);
}

TEST(Aots, MonotoneCertificateWhenRootLiesBeyondRange) {
  AotsOptions opts;
  opts.mu_max = 1.0;
  const auto o = solve_aots(MixingDistribution::point_mass(), opts);
  EXPECT_FALSE(o.finite);
  EXPECT_TRUE(o.monotone_certificate);
  EXPECT_TRUE(std::isinf(o.mu_hat));
}

TEST(Bound, Battery) {
  const std::vector<MixingDistribution> battery = {
      MixingDistribution::point_mass(),
      MixingDistribution::point_mass(3.0),
      MixingDistribution::half_normal(),
      MixingDistribution::exponential(),
      MixingDistribution::lognormal(),
      MixingDistribution::atoms({0.5, 2.0}, {1.0, 1.0}),
      MixingDistribution::atoms({1.0, 1.1}, {0.9, 0.1}),
      MixingDistribution::exponential().scaled(0.5),
  };
  for (const auto& R : battery) {
    const auto rep = aoa_bound_check(R);
    EXPECT_TRUE(rep.within_bound) << R.label();
    EXPECT_LE(rep.aoa, 0.2339) << R.label();
    EXPECT_TRUE(rep.consistent) << R.label();
    EXPECT_EQ(rep.equality, R.is_degenerate()) << R.label();
  }
}

TEST(Scales, RoundTrips) {
  const double mu = 1.19060124834277;
  EXPECT_NEAR(transformed_scale(aos(mu, 10.0, 10.0, 100), 100, 10.0, 10.0), mu, 1e-14);
  EXPECT_NEAR(transformed_scale(1.1906, 4, 2.0, 2.0), 1.1906, 1e-14);
  EXPECT_NEAR(transformed_scale(2.0, 9, 3.0, 3.0), 2.0 * transformed_scale(1.0, 9, 3.0, 3.0), 1e-14);
  EXPECT_NEAR(scale_from_transformed(transformed_scale(0.3, 17, 17.0, std::sqrt(17.0)), 17, 17.0, std::sqrt(17.0)),
              0.3, 1e-14);
  EXPECT_NEAR(aos(mu, 100.0, 10.0, 100), 2.0 * mu, 1e-14);
}

TEST(Families, LimitingMixing) {
  EXPECT_TRUE(limiting_mixing(TargetFamily::gaussian())->is_degenerate());
  EXPECT_EQ(limiting_mixing(TargetFamily::radial_gaussian())->label(), MixingDistribution::half_normal().label());
  EXPECT_FALSE(limiting_mixing(TargetFamily::custom(nullptr)).has_value());
}

TEST(Families, SampledShellRadius) {
  const auto m = build_example_target(TargetFamily::radial_exponential(), 20);
  const auto R = mixing_from_target(m, 100000, 3);
  EXPECT_EQ(R.kind(), MixingDistribution::Kind::SampleBased);
  const auto o = solve_aots(R);
  ASSERT_TRUE(o.finite);
  EXPECT_NEAR(o.mu_hat, 2.85185745599258, 0.05);
}
