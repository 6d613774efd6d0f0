#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rwm/target_models.hpp"

namespace rwm {

/// Tolerances for the nested radial quadrature behind EAR and ESJD.
struct EngineOptions {
  double outer_abs_tol = 1e-9;
  double outer_rel_tol = 1e-10;
  double inner_abs_tol = 1e-11;
  double inner_rel_tol = 1e-10;
  /// Integrand evaluations allowed per scale value (inner and outer combined).
  std::size_t max_evals = 1'000'000;
};

struct EarEsjd {
  double ear = 0.0;
  double esjd = 0.0;
  double ear_error = 0.0;
  double esjd_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// One-dimensional marginal distribution function F_{1|d}(x1) of a spherical target.
double marginal_cdf(const RadialModel& target, double x1, const EngineOptions& opts = {});

/// E[K_d(s/|X|)] = 2 F_{1|d}(-s) for s >= 0.
double tail_kernel_mean(const RadialModel& target, double s, const EngineOptions& opts = {});

/// Expected acceptance rate and expected squared jump distance at scale lambda.
///
/// Outer integral over the proposal radius y, inner over the target radius
/// x > lambda y / 2, both in log-radius. Throws QuadratureError when the
/// combined tolerance is not met within the evaluation budget.
EarEsjd ear_esjd(const RadialModel& target, const RadialModel& proposal, double lambda,
                 const EngineOptions& opts = {});

double ear(const RadialModel& target, const RadialModel& proposal, double lambda,
           const EngineOptions& opts = {});
double esjd(const RadialModel& target, const RadialModel& proposal, double lambda,
            const EngineOptions& opts = {});

struct CurvePoint {
  double lambda = 0.0;
  double ear = 0.0;
  double esjd = 0.0;
  bool converged = false;
  std::string error;
};

/// Tabulated (lambda, EAR, ESJD) triples for one target/proposal/dimension.
struct ScalingCurve {
  std::string target;
  std::string proposal;
  int dimension = 0;
  std::vector<CurvePoint> points;

  /// (EAR, ESJD) pairs in lambda order.
  std::vector<std::pair<double, double>> parametric() const;
};

/// Evaluates EAR and ESJD over a strictly increasing positive grid.
/// Quadrature failures are recorded per point instead of aborting.
ScalingCurve curve(const RadialModel& target, const RadialModel& proposal,
                   std::span<const double> lambdas, const EngineOptions& opts = {});

struct ClosedForm {
  double ear;
  double esjd;
};

/// d = 1, Gaussian target and Gaussian proposal.
ClosedForm closed_form_gaussian_1d(double lambda);

/// d = 1, double-exponential target and proposal.
ClosedForm closed_form_laplace_1d(double lambda);

/// Log-spaced grid of n points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace rwm
