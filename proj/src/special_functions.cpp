#include "rwm/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rwm/error.hpp"

namespace rwm {

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double gaussian_pdf(double x) {
  constexpr double kInvSqrt2Pi = 0.3989422804014326779;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIter = 10000;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// I_u(a, b) with the log of B(a, b) supplied by the caller.
double incomplete_beta(double u, double a, double b, double lbeta) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double log_front = a * std::log(u) + b * std::log1p(-u) - lbeta;
  if (u < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(u, a, b) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(1.0 - u, b, a) / b;
}

}  // namespace

double beta_cdf(double u, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError("beta_cdf: shape parameters must be positive");
  }
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("beta_cdf: u = " + std::to_string(u) + " outside [0, 1]");
  }
  return incomplete_beta(u, a, b, log_beta(a, b));
}

ProjectionKernel::ProjectionKernel(int d) : d_(d), b_(0.5 * (d - 1)), log_beta_(0.0) {
  if (d < 1) throw DomainError("ProjectionKernel: dimension must be >= 1");
  if (d > 1) log_beta_ = log_beta(0.5, b_);
}

double ProjectionKernel::G(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("G_d: argument outside [0, 1]");
  if (d_ == 1) return u < 1.0 ? 0.0 : 1.0;
  return incomplete_beta(u, 0.5, b_, log_beta_);
}

double ProjectionKernel::K(double x) const {
  if (!(x >= 0.0)) throw DomainError("K_d: argument must be non-negative");
  if (x >= 1.0) return 0.0;
  if (d_ == 1) return 1.0;
  if (d_ == 2) return 1.0 - 2.0 / std::numbers::pi * std::asin(x);
  if (d_ == 3) return 1.0 - x;
  // Small x: direct form, since 1 - x^2 rounds away the information.
  if (x < 0.5) return 1.0 - incomplete_beta(x * x, 0.5, b_, log_beta_);
  // 1 - I_{x^2}(1/2, b) = I_{1 - x^2}(b, 1/2); the reflected form keeps
  // full relative accuracy as K_d -> 0 near x = 1.
  const double w = (1.0 - x) * (1.0 + x);
  return incomplete_beta(w, b_, 0.5, log_beta_);
}

double kernel_K(int d, double x) { return ProjectionKernel(d).K(x); }

}  // namespace rwm
