#include <array>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "rwm/quadrature.hpp"

using namespace rwm;

TEST(Quadrature, PolynomialExactOnOneSegment) {
  auto f = [](double x) { return 3.0 * x * x - 2.0 * x + 1.0; };
  const auto r = quad::integrate<double>(f, 0.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 8.0 - 4.0 + 2.0, 1e-13);
  EXPECT_EQ(r.evaluations, 15u);
}

TEST(Quadrature, GaussianIntegral) {
  auto f = [](double x) { return std::exp(-0.5 * x * x); };
  const auto r = quad::integrate<double>(f, -40.0, 40.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, std::sqrt(2.0 * std::numbers::pi), 1e-10);
}

TEST(Quadrature, KinkNeedsSubdivision) {
  auto f = [](double x) { return std::fabs(x - 0.3); };
  const auto r = quad::integrate<double>(f, 0.0, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-10);
  EXPECT_GT(r.evaluations, 15u);
}

TEST(Quadrature, VectorValuedSharesEvaluations) {
  int calls = 0;
  auto f = [&](double x) {
    ++calls;
    return std::array<double, 2>{std::sin(x), x * x};
  };
  const auto r = quad::integrate<std::array<double, 2>>(f, 0.0, std::numbers::pi);
  EXPECT_NEAR(r.value[0], 2.0, 1e-12);
  EXPECT_NEAR(r.value[1], std::pow(std::numbers::pi, 3) / 3.0, 1e-11);
  EXPECT_EQ(static_cast<std::size_t>(calls), r.evaluations);
}

TEST(Quadrature, BudgetExhaustionReportsNotConverged) {
  auto f = [](double x) { return 1.0 / std::sqrt(x); };
  quad::Options o;
  o.abs_tol = 1e-15;
  o.rel_tol = 1e-15;
  o.max_evals = 200;
  const auto r = quad::integrate<double>(f, 0.0, 1.0, o);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 200u);
}

TEST(Quadrature, CellsBetweenClipsAndSkipsOutside) {
  const double bp[] = {-5.0, 0.0, 1.0, 2.0, 9.0};
  const auto cells = quad::cells_between(bp, 0.5, 3.0);
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells.front().lo, 0.5);
  EXPECT_EQ(cells[1].lo, 1.0);
  EXPECT_EQ(cells.back().hi, 3.0);
}
