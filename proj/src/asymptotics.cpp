#include "rwm/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/tools/toms748_solve.hpp>

#include "rwm/error.hpp"
#include "rwm/quadrature.hpp"
#include "rwm/special_functions.hpp"

namespace rwm {

namespace {

constexpr double kZeroRadius = 1e-6;
constexpr double kZeroMassLimit = 1e-3;
constexpr double kScanLo = -400.0;
constexpr double kScanHi = 400.0;
constexpr double kScanStep = 0.01;
constexpr double kScanDrop = 700.0;
constexpr int kBaseCells = 64;

}  // namespace

struct MixingDistribution::Impl {
  Kind kind = Kind::PointMass;
  std::string label;
  double scale = 1.0;
  // PointMass / Atoms / SampleBased
  std::vector<double> values;
  std::vector<double> weights;
  // NamedDensity: log density in r, region and normalizer in t = log r
  std::function<double(double)> log_density;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double log_z = 0.0;
  std::vector<double> landmarks;  // in t

  double log_density_t(double t) const {
    const double v = log_density(std::exp(t));
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v + t - log_z;
  }

  std::vector<quad::Interval> cells(std::span<const double> extra_t) const {
    std::vector<double> bp;
    bp.reserve(kBaseCells + 1 + landmarks.size() + extra_t.size());
    for (int i = 0; i <= kBaseCells; ++i) bp.push_back(t_lo + (t_hi - t_lo) * i / kBaseCells);
    bp.insert(bp.end(), landmarks.begin(), landmarks.end());
    bp.insert(bp.end(), extra_t.begin(), extra_t.end());
    std::sort(bp.begin(), bp.end());
    return quad::cells_between(bp, t_lo, t_hi);
  }
};

MixingDistribution MixingDistribution::point_mass(double at) {
  if (!(at > 0.0) || !std::isfinite(at)) {
    throw PointMassAtZero("point mass location must be positive and finite");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::PointMass;
  impl->label = "point:" + std::to_string(at);
  impl->values = {at};
  impl->weights = {1.0};
  return MixingDistribution(std::move(impl));
}

MixingDistribution MixingDistribution::atoms(std::vector<double> values, std::vector<double> weights) {
  if (values.empty() || values.size() != weights.size()) {
    throw InvalidParameter("atoms: values and weights must be non-empty and of equal length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw InvalidParameter("atoms: bad weight");
    if (!std::isfinite(values[i]) || values[i] < 0.0) throw InvalidParameter("atoms: bad location");
    if (values[i] <= kZeroRadius && weights[i] > 0.0) throw PointMassAtZero("atoms: mass at zero");
    total += weights[i];
  }
  if (!(total > 0.0)) throw InvalidParameter("atoms: weights sum to zero");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Atoms;
  impl->label = "atoms";
  impl->values = std::move(values);
  impl->weights = std::move(weights);
  for (auto& w : impl->weights) w /= total;
  return MixingDistribution(std::move(impl));
}

MixingDistribution MixingDistribution::named_density(std::string label,
                                                     std::function<double(double)> log_density) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::NamedDensity;
  impl->label = std::move(label);
  impl->log_density = std::move(log_density);

  const int n = static_cast<int>((kScanHi - kScanLo) / kScanStep);
  std::vector<double> g(n + 1);
  double gmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    const double t = kScanLo + i * kScanStep;
    const double v = impl->log_density(std::exp(t));
    g[i] = std::isnan(v) ? -std::numeric_limits<double>::infinity() : v + t;
    gmax = std::max(gmax, g[i]);
  }
  if (!std::isfinite(gmax)) throw NormalizationError(impl->label + ": density vanishes everywhere");
  int first = -1;
  int last = -1;
  for (int i = 0; i <= n; ++i) {
    if (g[i] >= gmax - kScanDrop) {
      if (first < 0) first = i;
      last = i;
    }
  }
  // Touching a scan edge is fine when the log-radius density still decays
  // geometrically there; the truncated tail is then below exp(-kScanDrop).
  const double slope_lo = (g[1] - g[0]) / kScanStep;
  const double slope_hi = (g[n] - g[n - 1]) / kScanStep;
  if ((first == 0 && !(slope_lo > 0.1)) || (last == n && !(slope_hi < -0.1))) {
    throw NormalizationError(impl->label + ": density is not normalizable on (0, inf)");
  }
  impl->t_lo = kScanLo + std::max(first - 1, 0) * kScanStep;
  impl->t_hi = kScanLo + std::min(last + 1, n) * kScanStep;
  for (int i = std::max(first, 1); i < std::min(last, n - 1); ++i) {
    if (g[i] > g[i - 1] && g[i] >= g[i + 1]) {
      const double t = kScanLo + i * kScanStep;
      for (double off : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
        if (t + off > impl->t_lo && t + off < impl->t_hi) impl->landmarks.push_back(t + off);
      }
    }
  }

  impl->log_z = gmax;
  const auto cells = impl->cells({});
  quad::Options qo;
  qo.abs_tol = 0.0;
  qo.rel_tol = 1e-13;
  qo.max_evals = 200000;
  const auto z = quad::integrate<double>([&](double t) { return std::exp(impl->log_density_t(t)); },
                                         cells, qo);
  if (!(z.value > 0.0) || !std::isfinite(z.value)) {
    throw NormalizationError(impl->label + ": normalizer is not positive and finite");
  }
  impl->log_z = gmax + std::log(z.value);

  const double tz = std::log(kZeroRadius);
  if (impl->t_lo < tz) {
    const auto near_zero = quad::integrate<double>(
        [&](double t) { return std::exp(impl->log_density_t(t)); }, impl->t_lo, tz, qo);
    if (near_zero.value > kZeroMassLimit) {
      throw PointMassAtZero(impl->label + ": mass below 1e-6 is " + std::to_string(near_zero.value));
    }
  }
  return MixingDistribution(std::move(impl));
}

MixingDistribution MixingDistribution::half_normal() {
  return named_density("halfnormal", [](double r) { return -0.5 * r * r; });
}

MixingDistribution MixingDistribution::exponential() {
  return named_density("exp", [](double r) { return -r; });
}

MixingDistribution MixingDistribution::lognormal() {
  return named_density("lognormal", [](double r) {
    const double l = std::log(r);
    return -0.5 * l * l;
  });
}

MixingDistribution MixingDistribution::from_samples(std::vector<double> radii, std::string label) {
  if (radii.size() < 2) throw InvalidParameter("samples: need at least two radii");
  std::size_t small = 0;
  for (double r : radii) {
    if (!std::isfinite(r) || r < 0.0) throw InvalidParameter("samples: radii must be finite and >= 0");
    if (r <= kZeroRadius) ++small;
  }
  if (static_cast<double>(small) / static_cast<double>(radii.size()) > kZeroMassLimit) {
    throw PointMassAtZero(label + ": too many radii at zero");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::SampleBased;
  impl->label = std::move(label);
  impl->values = std::move(radii);
  return MixingDistribution(std::move(impl));
}

MixingDistribution::Kind MixingDistribution::kind() const { return impl_->kind; }
const std::string& MixingDistribution::label() const { return impl_->label; }

bool MixingDistribution::is_degenerate() const {
  switch (impl_->kind) {
    case Kind::PointMass:
      return true;
    case Kind::Atoms: {
      std::size_t support = 0;
      double at = 0.0;
      for (std::size_t i = 0; i < impl_->values.size(); ++i) {
        if (impl_->weights[i] <= 0.0) continue;
        if (support == 0 || impl_->values[i] != at) ++support;
        at = impl_->values[i];
      }
      return support == 1;
    }
    case Kind::SampleBased: {
      const auto [lo, hi] = std::minmax_element(impl_->values.begin(), impl_->values.end());
      return *lo == *hi;
    }
    case Kind::NamedDensity:
      return false;
  }
  return false;
}

MixingDistribution MixingDistribution::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidParameter("scale factor must be positive");
  auto impl = std::make_shared<Impl>(*impl_);
  impl->scale *= c;
  impl->label = impl_->label + "*" + std::to_string(c);
  if (impl->kind != Kind::NamedDensity) {
    for (double v : impl->values) {
      if (v * impl->scale <= kZeroRadius) {
        if (impl->kind == Kind::SampleBased) continue;
        throw PointMassAtZero(impl->label + ": mass at zero");
      }
    }
  } else {
    const double tz = std::log(kZeroRadius / impl->scale);
    if (impl->t_lo < tz) {
      quad::Options qo;
      qo.abs_tol = 0.0;
      qo.rel_tol = 1e-10;
      const auto near_zero = quad::integrate<double>(
          [&](double t) { return std::exp(impl->log_density_t(t)); }, impl->t_lo, std::min(tz, impl->t_hi),
          qo);
      if (near_zero.value > kZeroMassLimit) throw PointMassAtZero(impl->label + ": mass at zero");
    }
  }
  return MixingDistribution(std::move(impl));
}

Estimate MixingDistribution::expect(const std::function<double(double)>& fn,
                                    std::span<const double> scale_hints) const {
  const Impl& m = *impl_;
  const double c = m.scale;
  switch (m.kind) {
    case Kind::PointMass:
    case Kind::Atoms: {
      double s = 0.0;
      for (std::size_t i = 0; i < m.values.size(); ++i) {
        if (m.weights[i] > 0.0) s += m.weights[i] * fn(c * m.values[i]);
      }
      return {s, 0.0};
    }
    case Kind::SampleBased: {
      double mean = 0.0;
      double m2 = 0.0;
      std::size_t k = 0;
      for (double v : m.values) {
        const double x = fn(c * v);
        ++k;
        const double delta = x - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (x - mean);
      }
      const double var = m2 / static_cast<double>(k - 1);
      return {mean, std::sqrt(var / static_cast<double>(k))};
    }
    case Kind::NamedDensity: {
      std::vector<double> extra;
      for (double h : scale_hints) {
        if (h > 0.0 && std::isfinite(h)) extra.push_back(std::log(h / c));
      }
      auto f = [&](double t) {
        const double w = std::exp(m.log_density_t(t));
        return w > 0.0 ? w * fn(c * std::exp(t)) : 0.0;
      };
      quad::Options qo;
      qo.abs_tol = 1e-300;
      qo.rel_tol = 1e-12;
      qo.max_evals = 300000;
      const auto res = quad::integrate<double>(f, m.cells(extra), qo);
      return {res.value, res.error};
    }
  }
  return {};
}

double MixingDistribution::second_moment() const {
  return expect([](double r) { return r * r; }).value;
}

Estimate theta_estimate(const MixingDistribution& R, double x) {
  if (x == 0.0) return {0.5, 0.0};
  const double mu = std::fabs(x);
  const double hints[] = {mu, mu / 5.0, mu / 38.0};
  const Estimate lower = R.expect([mu](double r) { return gaussian_cdf(-mu / r); }, hints);
  if (x < 0.0) return lower;
  return {1.0 - lower.value, lower.error};
}

double theta(const MixingDistribution& R, double x) { return theta_estimate(R, x).value; }

double theta_prime_at_minus(const MixingDistribution& R, double mu) {
  const double m = std::fabs(mu);
  const double hints[] = {m, m / 5.0, m / 38.0};
  return R.expect([m](double r) { return gaussian_pdf(m / r) / r; }, hints).value;
}

double limit_ear(const MixingDistribution& R, double mu) {
  if (mu < 0.0) throw DomainError("limit_ear: mu must be >= 0");
  return 2.0 * theta(R, -mu);
}

double limit_esjd(const MixingDistribution& R, double mu) {
  if (mu < 0.0) throw DomainError("limit_esjd: mu must be >= 0");
  return 2.0 * mu * mu * theta(R, -mu);
}

Estimate limit_ear_general(const MixingDistribution& R, const MixingDistribution& Y, double mu) {
  if (mu < 0.0) throw DomainError("limit_ear_general: mu must be >= 0");
  double inner_error = 0.0;
  const Estimate e = Y.expect([&](double y) {
    const Estimate t = theta_estimate(R, -mu * y);
    inner_error = std::max(inner_error, t.error);
    return 2.0 * t.value;
  });
  return {e.value, e.error + 2.0 * inner_error};
}

Estimate limit_esjd_general(const MixingDistribution& R, const MixingDistribution& Y, double mu) {
  if (mu < 0.0) throw DomainError("limit_esjd_general: mu must be >= 0");
  double inner_error = 0.0;
  double y2max = 0.0;
  const Estimate e = Y.expect([&](double y) {
    const Estimate t = theta_estimate(R, -mu * y);
    inner_error = std::max(inner_error, t.error);
    y2max = std::max(y2max, y * y);
    return 2.0 * mu * mu * y * y * t.value;
  });
  return {e.value, e.error + 2.0 * mu * mu * y2max * inner_error};
}

double optimality_residual(const MixingDistribution& R, double mu) {
  return 2.0 * theta(R, -mu) - mu * theta_prime_at_minus(R, mu);
}

AsymptoticOptimum solve_aots(const MixingDistribution& R, const AotsOptions& opts) {
  if (!(opts.mu_min > 0.0) || !(opts.mu_max > opts.mu_min) || opts.points_per_decade < 2) {
    throw InvalidParameter("solve_aots: bad search range");
  }
  const double l0 = std::log10(opts.mu_min);
  const double l1 = std::log10(opts.mu_max);
  const int n = static_cast<int>(std::ceil((l1 - l0) * opts.points_per_decade));

  std::vector<double> mus;
  std::vector<double> gs;
  bool underflow = false;
  for (int i = 0; i <= n; ++i) {
    const double mu = std::pow(10.0, l0 + (l1 - l0) * i / n);
    const double a = 2.0 * theta(R, -mu);
    const double b = mu * theta_prime_at_minus(R, mu);
    if (a == 0.0 && b == 0.0) {
      underflow = true;
      break;
    }
    mus.push_back(mu);
    gs.push_back(a - b);
  }

  AsymptoticOptimum out;
  auto g_log = [&](double u) { return optimality_residual(R, std::exp(u)); };
  for (std::size_t i = 1; i < gs.size(); ++i) {
    if ((gs[i - 1] > 0.0) == (gs[i] > 0.0)) continue;
    double root;
    if (gs[i] == 0.0) {
      root = mus[i];
    } else {
      boost::uintmax_t iters = 200;
      const auto [lo, hi] = boost::math::tools::toms748_solve(
          g_log, std::log(mus[i - 1]), std::log(mus[i]), gs[i - 1], gs[i],
          boost::math::tools::eps_tolerance<double>(50), iters);
      root = std::exp(0.5 * (lo + hi));
    }
    out.roots.push_back(root);
  }

  std::optional<double> first_down;
  for (std::size_t i = 1, r = 0; i < gs.size(); ++i) {
    if ((gs[i - 1] > 0.0) == (gs[i] > 0.0)) continue;
    if (gs[i - 1] > 0.0 && !first_down) first_down = out.roots[r];
    ++r;
  }

  if (!first_down) {
    out.finite = false;
    out.mu_hat = std::numeric_limits<double>::infinity();
    out.monotone_certificate =
        !underflow && std::all_of(gs.begin(), gs.end(), [](double g) { return g > 0.0; });
    return out;
  }
  out.finite = true;
  out.mu_hat = *first_down;
  const double a = 2.0 * theta(R, -out.mu_hat);
  out.residual = std::fabs(a - out.mu_hat * theta_prime_at_minus(R, out.mu_hat));
  if (!(out.residual < 1e-8)) {
    throw RootRefinementError("solve_aots: residual " + std::to_string(out.residual) + " exceeds 1e-8");
  }
  out.aoa = a;
  out.limit_esjd_at_mu_hat = out.mu_hat * out.mu_hat * a;
  return out;
}

namespace {

const AsymptoticOptimum& shell_optimum() {
  static const AsymptoticOptimum opt = solve_aots(MixingDistribution::point_mass(1.0));
  return opt;
}

}  // namespace

double shell_optimal_acceptance() { return shell_optimum().aoa; }
double shell_optimal_mu() { return shell_optimum().mu_hat; }

AoaBoundReport aoa_bound_check(const MixingDistribution& R) {
  const auto opt = solve_aots(R);
  if (!opt.finite) throw DomainError("aoa_bound_check: no finite optimal scaling for " + R.label());
  AoaBoundReport rep;
  rep.aoa = opt.aoa;
  rep.bound = shell_optimal_acceptance();
  rep.gap = rep.bound - rep.aoa;
  rep.within_bound = rep.aoa <= rep.bound + 1e-9;
  rep.equality = std::fabs(rep.gap) <= 1e-4;
  rep.degenerate = R.is_degenerate();
  rep.consistent = rep.equality == rep.degenerate;
  return rep;
}

double aos(double mu_hat, double k_x, double k_y, int d) {
  if (d < 1 || !(k_x > 0.0) || !(k_y > 0.0)) throw InvalidParameter("aos: bad scale constants");
  return 2.0 * mu_hat * k_x / (std::sqrt(static_cast<double>(d)) * k_y);
}

double transformed_scale(double lambda, int d, double k_x, double k_y) {
  if (d < 1 || !(k_x > 0.0) || !(k_y > 0.0)) throw InvalidParameter("transformed_scale: bad constants");
  return 0.5 * std::sqrt(static_cast<double>(d)) * k_y * lambda / k_x;
}

double scale_from_transformed(double mu, int d, double k_x, double k_y) {
  return aos(mu, k_x, k_y, d);
}

std::optional<MixingDistribution> limiting_mixing(const TargetFamily& family) {
  switch (family.kind) {
    case FamilyKind::Gaussian:
    case FamilyKind::Exponential:
    case FamilyKind::GaussianMixture:
      return MixingDistribution::point_mass(1.0);
    case FamilyKind::RadialGaussian:
      return MixingDistribution::half_normal();
    case FamilyKind::RadialExponential:
      return MixingDistribution::exponential();
    case FamilyKind::UnimodalLognormal:
      return MixingDistribution::lognormal();
    case FamilyKind::CustomRadialTable:
      return std::nullopt;
  }
  return std::nullopt;
}

MixingDistribution mixing_from_target(const RadialModel& model, std::size_t n, std::uint64_t seed) {
  const double k = model.scale_constant().value_or(1.0);
  auto radii = model.sample(n, seed);
  for (auto& r : radii) r /= k;
  return MixingDistribution::from_samples(std::move(radii), "from-target:" + model.label());
}

}  // namespace rwm
