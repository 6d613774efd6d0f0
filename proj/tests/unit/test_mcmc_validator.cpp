#include <cmath>

#include <gtest/gtest.h>

#include "rwm/error.hpp"
#include "rwm/exact_engine.hpp"
#include "rwm/mcmc_validator.hpp"

using namespace rwm;

namespace {

RadialModel gauss(int d) { return build_example_target(TargetFamily::gaussian(), d); }

ChainOptions iters(std::size_t n, std::uint64_t seed = 1) {
  ChainOptions o;
  o.n_iters = n;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(Chain, GaussianOneDimAtOptimum) {
  const auto g = gauss(1);
  const auto s = run_rwm(g, g, 2.43, iters(400000));
  EXPECT_NEAR(s.accept_rate.value, closed_form_gaussian_1d(2.43).ear, 3.0 * s.accept_rate.error);
  EXPECT_NEAR(s.esjd.value, closed_form_gaussian_1d(2.43).esjd, 3.0 * s.esjd.error);
  EXPECT_EQ(s.burn_in, 40000u);
  EXPECT_GE(s.accept_rate.error, 0.0);
}

TEST(Chain, GaussianTenDimMatchesQuadrature) {
  const auto g = gauss(10);
  const double lambda = 2.381 / std::sqrt(10.0);
  const auto s = run_rwm(g, g, lambda, iters(300000, 7));
  const auto exact = ear_esjd(g, g, lambda);
  EXPECT_NEAR(s.accept_rate.value, exact.ear, 3.0 * s.accept_rate.error);
  EXPECT_NEAR(s.esjd.value, exact.esjd, 3.0 * s.esjd.error);
  EXPECT_NEAR(s.radius_sq_ratio.value, 1.0, 3.0 * s.radius_sq_ratio.error);
}

TEST(Chain, TinyScaleAcceptsAlmostEverything) {
  const auto e = build_example_target(TargetFamily::exponential(), 5);
  const auto s = run_rwm(e, gauss(5), 1e-4, iters(20000));
  EXPECT_GT(s.accept_rate.value, 0.99);
  EXPECT_TRUE(s.near_one_acceptance);
}

TEST(Chain, ReproducibleForSeed) {
  const auto g = gauss(3);
  const auto a = run_rwm(g, g, 1.0, iters(20000, 5));
  const auto b = run_rwm(g, g, 1.0, iters(20000, 5));
  EXPECT_EQ(a.accept_rate.value, b.accept_rate.value);
  EXPECT_EQ(a.esjd.value, b.esjd.value);
  EXPECT_EQ(a.esjd.error, b.esjd.error);
  const auto c = run_rwm(g, g, 1.0, iters(20000, 6));
  EXPECT_NE(a.esjd.value, c.esjd.value);
}

TEST(Chain, RejectsShortRuns) {
  const auto g = gauss(1);
  EXPECT_THROW(run_rwm(g, g, 1.0, iters(100)), InvalidParameter);
}

TEST(Chain, EllipticalTwoAxis) {
  const auto g = gauss(2);
  auto o = iters(200000, 3);
  o.eigenvalues = {1.0, 3.0};
  const auto s = run_rwm(g, g, 1.0, o);
  EXPECT_NEAR(s.accept_rate.value, 0.302081, 3.0 * std::hypot(s.accept_rate.error, 0.000288));
  EXPECT_NEAR(s.esjd.value, 0.830558, 3.0 * std::hypot(s.esjd.error, 0.000178));
}

TEST(MonteCarlo, LaplaceAtFour) {
  const auto l = build_example_target(TargetFamily::exponential(), 1);
  const auto m = mc_expectation(l, l, 4.0, 20000, 2);
  EXPECT_EQ(m.n_samples, 20000u);
  EXPECT_NEAR(m.ear.value, 1.0 / 3.0, 3.0 * m.ear.error);
  EXPECT_NEAR(m.esjd.value, 256.0 / 216.0, 3.0 * m.esjd.error);
}

TEST(MonteCarlo, GaussianTenDim) {
  const auto g = gauss(10);
  const auto m = mc_expectation(g, g, 0.75, 10000, 9);
  const auto exact = ear_esjd(g, g, 0.75);
  EXPECT_NEAR(m.ear.value, exact.ear, 3.0 * m.ear.error);
  EXPECT_NEAR(m.esjd.value, exact.esjd, 3.0 * m.esjd.error);
}

TEST(MonteCarlo, TinyScale) {
  const auto g = gauss(4);
  const auto m = mc_expectation(g, g, 1e-6, 10000, 1);
  EXPECT_NEAR(m.ear.value, 1.0, std::max(3.0 * m.ear.error, 1e-6));
  EXPECT_THROW(mc_expectation(g, g, 1.0, 100, 1), InvalidParameter);
}
