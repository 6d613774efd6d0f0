#pragma once

namespace rwm {

/// Standard Gaussian distribution function Phi(x).
double gaussian_cdf(double x);

/// Standard Gaussian density phi(x).
double gaussian_pdf(double x);

/// Regularized incomplete beta I_u(a, b).
///
/// Continued fraction (modified Lentz) evaluated on whichever side of
/// u = (a + 1) / (a + b + 2) converges fastest. Throws DomainError for
/// u outside [0, 1] or non-positive shape parameters.
double beta_cdf(double u, double a, double b);

/// Projection kernel of a uniformly random direction in d dimensions.
///
/// With U_d ~ Beta(1/2, (d - 1)/2) (and U_1 = 1), G_d is the distribution
/// function of U_d and K_d(x) = 1 - G_d(x^2). K_d(x) is the probability
/// that the squared cosine between a fixed axis and a uniform direction
/// exceeds x^2; it is 1 at x = 0 and 0 for x >= 1.
class ProjectionKernel {
 public:
  explicit ProjectionKernel(int d);

  int dimension() const { return d_; }

  /// G_d(u) for u in [0, 1].
  double G(double u) const;

  /// K_d(x) for x >= 0.
  double K(double x) const;
  double operator()(double x) const { return K(x); }

 private:
  int d_;
  double b_;         // (d - 1) / 2
  double log_beta_;  // log B(1/2, b)
};

/// K_d(x); convenience wrapper constructing a ProjectionKernel.
double kernel_K(int d, double x);

}  // namespace rwm
