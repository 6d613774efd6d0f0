#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwm/exact_engine.hpp"
#include "rwm/scaling_optimizer.hpp"
#include "rwm/target_models.hpp"

namespace rwm {

/// Eigenvalues of the sphering map T as a function of d.
struct EigenRule {
  enum class Kind { Const, Iota, Spike, List };
  Kind kind = Kind::Const;
  double c = 1.0;
  bool spike_scales_with_d = false;  // spike:d puts d on the last axis
  std::vector<double> values;         // List only; fixes d
  std::string source;

  static EigenRule constant(double c);
  static EigenRule iota();
  /// (1, ..., 1, c); with_d = true uses c = d.
  static EigenRule spike(double c, bool with_d = false);
  static EigenRule list(std::vector<double> values, std::string source = "list");

  std::vector<double> eigenvalues(int d) const;
  std::string name() const;
};

class EllipticalSpec {
 public:
  EllipticalSpec(std::vector<double> eigenvalues, RadialModel core, RadialModel proposal);

  int dimension() const { return static_cast<int>(nu_.size()); }
  const std::vector<double>& eigenvalues() const { return nu_; }
  /// d^-1 sum nu_i^2
  double mean_square() const { return mean_square_; }
  double nu_max() const { return nu_max_; }
  double nu_min() const { return nu_min_; }
  const RadialModel& core() const { return core_; }
  const RadialModel& proposal() const { return proposal_; }

 private:
  std::vector<double> nu_;
  double mean_square_ = 0.0;
  double nu_max_ = 0.0;
  double nu_min_ = 0.0;
  RadialModel core_;
  RadialModel proposal_;
};

struct EccentricityRow {
  int d = 0;
  double ratio = 0.0;  // nu_max^2 / sum nu_i^2
};

struct EccentricityReport {
  std::vector<EccentricityRow> rows;
  double slope = 0.0;  // d log(ratio) / d log(d) over the last three dims
  bool satisfied = false;
};

EccentricityReport eccentricity_condition(const EigenRule& rule, std::span<const int> dims);

struct EllipticalOptions {
  std::size_t directions = 200000;
  std::uint64_t seed = 20240611;
  int nodes_per_decade = 64;
  EngineOptions engine;
};

struct EllipticalValue {
  double ear = 0.0;
  double esjd = 0.0;  // Euclidean in the transformed space = Mahalanobis in the original
  double ear_se = 0.0;
  double esjd_se = 0.0;
};

/// w = |T u| for u uniform on the unit sphere, n draws in deterministic streams.
std::vector<double> sample_direction_stretch(std::span<const double> eigenvalues, std::size_t n,
                                             std::uint64_t seed);

EllipticalValue elliptical_ear_esjd(const EllipticalSpec& spec, double lambda, const EllipticalOptions& opts = {});

struct EllipticalAos {
  double lambda_hat = 0.0;
  double nu_bar = 0.0;  // sqrt(mean_square)
  double k_y_star = 0.0;
  bool condition_violated = false;
  std::string warning;
};

/// lambda = 2 mu k_x* / (sqrt(d) k_y sqrt(nu_bar^2)).
EllipticalAos elliptical_aos(const EllipticalSpec& spec, double mu_hat, double k_x_star, double k_y,
                             const EccentricityReport* report = nullptr);

/// Maximizes the Mahalanobis ESJD over lambda (same contract as optimize).
ScalingOptimum elliptical_optimize(const EllipticalSpec& spec, const SearchOptions& search = {},
                                   const EllipticalOptions& opts = {});

struct StretchDeviationRow {
  int d = 0;
  double msd = 0.0;  // E[(|T U| / sqrt(nu_bar^2) - 1)^2]
  double se = 0.0;
};

struct StretchDeviationReport {
  std::vector<StretchDeviationRow> rows;
  double slope = 0.0;  // d log(msd) / d log(d) over the last three dims
  bool decreasing = false;
};

/// U = Z / sqrt(d) with Z standard Gaussian.
StretchDeviationReport lemma5_numeric_check(const EigenRule& rule, std::span<const int> dims,
                                  std::size_t samples = 100000, std::uint64_t seed = 20240611);

}  // namespace rwm
