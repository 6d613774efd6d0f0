#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwm/target_models.hpp"

namespace rwm {

/// A value with an absolute error estimate (quadrature error or Monte Carlo SE).
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Weak limit R of the rescaled radius |X^(d)| / k^(d).
class MixingDistribution {
 public:
  enum class Kind { PointMass, Atoms, NamedDensity, SampleBased };

  /// Degenerate R at `at` (the shell case when at = 1).
  static MixingDistribution point_mass(double at = 1.0);
  /// Finite mixture of point masses; weights are normalized.
  static MixingDistribution atoms(std::vector<double> values, std::vector<double> weights);
  /// R with density proportional to exp(log_density(r)) on (0, inf).
  static MixingDistribution named_density(std::string label, std::function<double(double)> log_density);
  static MixingDistribution half_normal();
  static MixingDistribution exponential();
  /// Density proportional to exp(-(log r)^2 / 2): the radial limit of the unimodal lognormal target.
  static MixingDistribution lognormal();
  /// Plug-in law from observed radii (all must be > 0).
  static MixingDistribution from_samples(std::vector<double> radii, std::string label = "samples");

  Kind kind() const;
  const std::string& label() const;

  /// True when all mass sits on a single point.
  bool is_degenerate() const;

  /// Law of c R.
  MixingDistribution scaled(double c) const;

  /// E[fn(R)]. `scale_hint` marks a radius where fn changes rapidly; it is
  /// added as a quadrature landmark for density kinds.
  Estimate expect(const std::function<double(double)>& fn, std::span<const double> scale_hints = {}) const;

  /// E[R^2] (infinite for heavy tails is reported as +inf).
  double second_moment() const;

  struct Impl;

 private:
  explicit MixingDistribution(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Theta(x) = E_R[Phi(x / R)].
double theta(const MixingDistribution& R, double x);
Estimate theta_estimate(const MixingDistribution& R, double x);

/// Theta'(-mu) = E[(1/R) phi(mu / R)].
double theta_prime_at_minus(const MixingDistribution& R, double mu);

/// Limiting EAR 2 Theta(-mu) and rescaled ESJD 2 mu^2 Theta(-mu).
double limit_ear(const MixingDistribution& R, double mu);
double limit_esjd(const MixingDistribution& R, double mu);

/// Limits with a general proposal radius limit Y: 2E[Phi(-mu Y / R)] and 2mu^2 E[Y^2 Phi(-mu Y / R)].
Estimate limit_ear_general(const MixingDistribution& R, const MixingDistribution& Y, double mu);
Estimate limit_esjd_general(const MixingDistribution& R, const MixingDistribution& Y, double mu);

/// g(mu) = 2 Theta(-mu) - mu Theta'(-mu); the rescaled ESJD increases exactly where g > 0.
double optimality_residual(const MixingDistribution& R, double mu);

struct AotsOptions {
  double mu_min = 1e-3;
  double mu_max = 1e6;
  int points_per_decade = 40;
};

/// Asymptotically optimal transformed scaling.
struct AsymptoticOptimum {
  bool finite = false;
  double mu_hat = 0.0;  // +inf when !finite
  double aoa = 0.0;     // 0 when !finite
  double limit_esjd_at_mu_hat = 0.0;
  double residual = 0.0;
  /// Every sign change of g on the search grid (refined), ascending.
  std::vector<double> roots;
  /// When !finite: g stayed strictly positive over the whole search range.
  bool monotone_certificate = false;
};

AsymptoticOptimum solve_aots(const MixingDistribution& R, const AotsOptions& opts = {});

/// 2 Phi(-mu_p) at the shell fixed point 2 Phi(-mu) = mu phi(mu).
double shell_optimal_acceptance();
double shell_optimal_mu();

struct AoaBoundReport {
  double aoa = 0.0;
  double bound = 0.0;  // the shell value, ~0.2338
  double gap = 0.0;    // bound - aoa
  bool within_bound = false;
  bool equality = false;    // |gap| <= 1e-4
  bool degenerate = false;  // R concentrated on one point
  bool consistent = false;  // equality iff degenerate
};

/// Requires a finite optimum; throws DomainError otherwise.
AoaBoundReport aoa_bound_check(const MixingDistribution& R);

/// lambda_d = 2 mu k_x / (sqrt(d) k_y).
double aos(double mu_hat, double k_x, double k_y, int d);

/// mu = (1/2) sqrt(d) k_y lambda / k_x, and its inverse.
double transformed_scale(double lambda, int d, double k_x, double k_y);
double scale_from_transformed(double mu, int d, double k_x, double k_y);

/// Limiting R of a family's rescaled radius when it has no point mass at 0.
/// Mixtures return the law stabilizing the lower component.
std::optional<MixingDistribution> limiting_mixing(const TargetFamily& family);

/// Sample-based R from n draws of f_d divided by k^(d).
MixingDistribution mixing_from_target(const RadialModel& model, std::size_t n, std::uint64_t seed);

}  // namespace rwm
