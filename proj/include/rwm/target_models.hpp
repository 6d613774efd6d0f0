#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rwm/quadrature.hpp"

namespace rwm {

enum class FamilyKind {
  Gaussian,
  Exponential,
  RadialGaussian,
  RadialExponential,
  UnimodalLognormal,
  GaussianMixture,
  CustomRadialTable,
};

/// Weight rule p_d of the second (wide) mixture component.
enum class MixtureRule { Constant, InverseD, InverseD2, InverseD3 };

/// Tabulated radial log-density log pi(r) read from a two-column text file.
class CustomRadialTable {
 public:
  CustomRadialTable(std::vector<double> radii, std::vector<double> log_pi, std::string source);

  /// Parses `r logpi` rows; `#` starts a comment.
  static CustomRadialTable load(const std::string& path);

  /// Monotone cubic interpolant; constant to the left of the first node and
  /// -infinity past the last node.
  double operator()(double r) const;

  const std::string& source() const { return source_; }

 private:
  std::vector<double> r_;
  std::vector<double> v_;
  std::shared_ptr<const std::function<double(double)>> interp_;
  std::string source_;
};

/// One of the example target (or proposal) families.
struct TargetFamily {
  FamilyKind kind = FamilyKind::Gaussian;
  MixtureRule rule = MixtureRule::Constant;
  double p = 0.0;
  std::shared_ptr<const CustomRadialTable> table;

  static TargetFamily of(FamilyKind k) {
    TargetFamily f;
    f.kind = k;
    return f;
  }
  static TargetFamily gaussian() { return of(FamilyKind::Gaussian); }
  static TargetFamily exponential() { return of(FamilyKind::Exponential); }
  static TargetFamily radial_gaussian() { return of(FamilyKind::RadialGaussian); }
  static TargetFamily radial_exponential() { return of(FamilyKind::RadialExponential); }
  static TargetFamily lognormal() { return of(FamilyKind::UnimodalLognormal); }
  static TargetFamily mixture(double p);
  static TargetFamily mixture(MixtureRule rule);
  static TargetFamily custom(std::shared_ptr<const CustomRadialTable> table);

  /// Mixture weight p_d for dimension d.
  double mixture_weight(int d) const;

  /// Canonical spec string, e.g. `mixture:p=1/d^2`.
  std::string name() const;

  /// Rescaling constant k^(d) stabilizing |X|/k, when the family defines one.
  std::optional<double> scale_constant(int d) const;
};

/// Marginal radial law f_d(r) of a d-dimensional spherically symmetric density.
///
/// The model stores log pi(r) up to a constant, computes the normalizer
/// numerically and tabulates the distribution of log|X| for sampling,
/// quantiles and quadrature breakpoints. Immutable and cheap to copy.
class RadialModel {
 public:
  using LogFn = std::function<double(double)>;

  struct Cell {
    double lo;  // log-radius
    double hi;
    double mass;
  };

  /// Builds f_d(r) = a_d r^(d-1) pi(r) / Z from the radial log-density of pi.
  static RadialModel from_density(int d, LogFn log_pi, std::string label,
                                  std::optional<double> k = std::nullopt);

  /// Builds a model whose radial density is given directly (up to a constant).
  static RadialModel from_radial_density(LogFn log_fbar, std::string label,
                                         std::optional<double> k = std::nullopt);

  int dimension() const;
  const std::string& label() const;
  std::optional<double> scale_constant() const;

  /// Unnormalized log pi at radius r.
  double log_pi(double r) const;
  /// log of the d-dimensional integral of pi.
  double log_normalizer() const;

  double log_density(double r) const;
  double density(double r) const;
  /// Log-density of log|X| at t.
  double log_density_log_radius(double t) const;

  double cdf(double r) const;
  double quantile(double p) const;

  /// Truncated support [F^-1(1e-12), F^-1(1 - 1e-12)] in radius units.
  double support_lo() const;
  double support_hi() const;

  /// Quadrature cells in log-radius covering the truncated support, with masses.
  std::span<const Cell> log_cells() const;

  /// E[|X|^power] by adaptive quadrature.
  double moment(double power) const;

  double sample_one(std::mt19937_64& rng) const;
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

  struct Impl;

 private:
  explicit RadialModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// log a_d with a_d = 2 pi^(d/2) / Gamma(d/2), the surface area of the unit sphere.
double log_sphere_area(int d);

/// f_d for one of the example families in dimension d.
RadialModel build_example_target(const TargetFamily& family, int d);

/// Radial log-density of pi for a family, up to a constant.
RadialModel::LogFn family_log_pi(const TargetFamily& family, int d);

}  // namespace rwm
