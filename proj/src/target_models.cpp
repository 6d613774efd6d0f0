#include "rwm/target_models.hpp"

#include <algorithm>
#include <math.h>  // pchip.hpp in Boost 1.74 calls unqualified isnan

#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "rwm/error.hpp"

namespace rwm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTailMass = 1e-12;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// CustomRadialTable

CustomRadialTable::CustomRadialTable(std::vector<double> radii, std::vector<double> log_pi,
                                     std::string source)
    : r_(std::move(radii)), v_(std::move(log_pi)), source_(std::move(source)) {
  if (r_.size() != v_.size()) throw InvalidParameter("custom table: column length mismatch");
  if (r_.size() < 4) throw InvalidParameter("custom table: need at least four rows");
  if (r_.front() < 0.0) throw InvalidParameter("custom table: radii must be >= 0");
  for (std::size_t i = 1; i < r_.size(); ++i) {
    if (!(r_[i] > r_[i - 1])) throw InvalidParameter("custom table: radii must be strictly increasing");
  }
  for (double v : v_) {
    if (!std::isfinite(v)) throw InvalidParameter("custom table: log pi values must be finite");
  }
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::vector<double>(r_), std::vector<double>(v_));
  interp_ = std::make_shared<const std::function<double(double)>>(
      [spline](double r) { return (*spline)(r); });
}

CustomRadialTable CustomRadialTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("custom table: cannot open '" + path + "'");
  std::vector<double> r;
  std::vector<double> v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double a = 0.0;
    double b = 0.0;
    if (!(row >> a)) continue;
    if (!(row >> b)) {
      throw InvalidParameter("custom table: line " + std::to_string(lineno) + " needs two columns");
    }
    std::string extra;
    if (row >> extra) {
      throw InvalidParameter("custom table: line " + std::to_string(lineno) + " has extra columns");
    }
    r.push_back(a);
    v.push_back(b);
  }
  return CustomRadialTable(std::move(r), std::move(v), path);
}

double CustomRadialTable::operator()(double r) const {
  if (r <= r_.front()) return v_.front();
  if (r > r_.back()) return kNegInf;
  return (*interp_)(r);
}

// ---------------------------------------------------------------------------
// TargetFamily

TargetFamily TargetFamily::mixture(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("mixture: constant weight must lie in (0, 1)");
  TargetFamily f = of(FamilyKind::GaussianMixture);
  f.rule = MixtureRule::Constant;
  f.p = p;
  return f;
}

TargetFamily TargetFamily::mixture(MixtureRule rule) {
  TargetFamily f = of(FamilyKind::GaussianMixture);
  f.rule = rule;
  return f;
}

TargetFamily TargetFamily::custom(std::shared_ptr<const CustomRadialTable> table) {
  TargetFamily f = of(FamilyKind::CustomRadialTable);
  f.table = std::move(table);
  return f;
}

double TargetFamily::mixture_weight(int d) const {
  switch (rule) {
    case MixtureRule::Constant: return p;
    case MixtureRule::InverseD: return 1.0 / d;
    case MixtureRule::InverseD2: return 1.0 / (static_cast<double>(d) * d);
    case MixtureRule::InverseD3: return 1.0 / (static_cast<double>(d) * d * d);
  }
  return p;
}

std::string TargetFamily::name() const {
  switch (kind) {
    case FamilyKind::Gaussian: return "gaussian";
    case FamilyKind::Exponential: return "exponential";
    case FamilyKind::RadialGaussian: return "radial-gaussian";
    case FamilyKind::RadialExponential: return "radial-exponential";
    case FamilyKind::UnimodalLognormal: return "lognormal";
    case FamilyKind::GaussianMixture:
      switch (rule) {
        case MixtureRule::Constant: return "mixture:p=" + format_number(p);
        case MixtureRule::InverseD: return "mixture:p=1/d";
        case MixtureRule::InverseD2: return "mixture:p=1/d^2";
        case MixtureRule::InverseD3: return "mixture:p=1/d^3";
      }
      break;
    case FamilyKind::CustomRadialTable: return "custom:" + (table ? table->source() : std::string{});
  }
  return "unknown";
}

std::optional<double> TargetFamily::scale_constant(int d) const {
  switch (kind) {
    case FamilyKind::Gaussian:
    case FamilyKind::GaussianMixture: return std::sqrt(static_cast<double>(d));
    case FamilyKind::Exponential: return static_cast<double>(d);
    case FamilyKind::RadialGaussian:
    case FamilyKind::RadialExponential:
    case FamilyKind::UnimodalLognormal: return 1.0;
    case FamilyKind::CustomRadialTable: return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// RadialModel

struct RadialModel::Impl {
  int d = 1;
  std::string label;
  std::optional<double> k;
  LogFn log_pi;
  double log_area = 0.0;
  double log_z = 0.0;

  // Tabulated law of T = log|X| on [t_lo, t_hi].
  double t_lo = 0.0;
  double h = 0.0;
  std::size_t n = 0;
  std::vector<double> g_edge;  // normalized log-density of T at cell edges
  std::vector<double> cum;     // CDF at cell edges

  double ta = 0.0;  // truncated support in t
  double tb = 0.0;
  std::vector<Cell> cells;

  double g(double t) const { return log_area + d * t + log_pi(std::exp(t)) - log_z; }

  double cdf_t(double t) const {
    if (t <= t_lo) return 0.0;
    const double t_hi = t_lo + h * static_cast<double>(n);
    if (t >= t_hi) return 1.0;
    auto i = static_cast<std::size_t>((t - t_lo) / h);
    i = std::min(i, n - 1);
    const double a = t_lo + h * static_cast<double>(i);
    const double norm = cum_scale;
    auto f = [&](double s) { return std::exp(g(s)) * norm; };
    const double partial = quad::detail::gk15<double>(f, a, t).value;
    return std::clamp(cum[i] + partial, 0.0, 1.0);
  }

  double quantile_t(double p) const {
    if (p <= 0.0) return t_lo;
    if (p >= 1.0) return t_lo + h * static_cast<double>(n);
    auto it = std::upper_bound(cum.begin(), cum.end(), p);
    std::size_t i = static_cast<std::size_t>(std::distance(cum.begin(), it));
    i = std::clamp<std::size_t>(i, 1, n) - 1;
    const double m = cum[i + 1] - cum[i];
    const double frac = m > 0.0 ? std::clamp((p - cum[i]) / m, 0.0, 1.0) : 0.5;
    return within_cell(i, frac);
  }

  // Inverts a log-linear density across cell i at fractional mass frac.
  double within_cell(std::size_t i, double frac) const {
    const double a = t_lo + h * static_cast<double>(i);
    const double ga = g_edge[i];
    const double gb = g_edge[i + 1];
    if (!std::isfinite(ga) || !std::isfinite(gb)) return a + frac * h;
    const double slope = (gb - ga) / h;
    const double bh = slope * h;
    if (std::fabs(bh) < 1e-9) return a + frac * h;
    if (slope > 0.0) return a + h + std::log(frac + (1.0 - frac) * std::exp(-bh)) / slope;
    return a + std::log1p(frac * std::expm1(bh)) / slope;
  }

  // Ratio between the table's own total and exp(log_z); keeps cum in [0, 1].
  double cum_scale = 1.0;
};

double log_sphere_area(int d) {
  const double half = 0.5 * d;
  return std::log(2.0) + half * std::log(std::numbers::pi) - std::lgamma(half);
}

RadialModel RadialModel::from_radial_density(LogFn log_fbar, std::string label,
                                             std::optional<double> k) {
  const double log2 = std::log(2.0);
  return from_density(
      1, [f = std::move(log_fbar), log2](double r) { return f(r) - log2; }, std::move(label), k);
}

RadialModel RadialModel::from_density(int d, LogFn log_pi, std::string label,
                                      std::optional<double> k) {
  if (d < 1) throw InvalidParameter("radial model: dimension must be >= 1");
  if (k && !(*k > 0.0)) throw InvalidParameter("radial model: rescaling constant must be positive");

  auto impl = std::make_shared<Impl>();
  impl->d = d;
  impl->label = std::move(label);
  impl->k = k;
  impl->log_pi = std::move(log_pi);
  impl->log_area = log_sphere_area(d);
  impl->log_z = 0.0;

  // Scan log-radius for the region carrying the mass.
  constexpr double kScanHalfWidth = 250.0;
  constexpr double kScanStep = 0.005;
  const auto n_scan = static_cast<std::size_t>(2.0 * kScanHalfWidth / kScanStep) + 1;
  std::vector<double> gs(n_scan);
  double gmax = kNegInf;
  for (std::size_t i = 0; i < n_scan; ++i) {
    const double t = -kScanHalfWidth + kScanStep * static_cast<double>(i);
    double v = impl->g(t);
    if (std::isnan(v)) v = kNegInf;
    if (v == std::numeric_limits<double>::infinity()) {
      throw NormalizationError("radial model '" + impl->label + "': density is infinite at r = " +
                               std::to_string(std::exp(t)));
    }
    gs[i] = v;
    gmax = std::max(gmax, v);
  }
  if (!std::isfinite(gmax)) {
    throw NormalizationError("radial model '" + impl->label + "': density vanishes everywhere");
  }
  constexpr double kRegionDrop = 50.0;
  std::size_t i0 = n_scan;
  std::size_t i1 = 0;
  for (std::size_t i = 0; i < n_scan; ++i) {
    if (gs[i] >= gmax - kRegionDrop) {
      i0 = std::min(i0, i);
      i1 = i;
    }
  }
  if (i0 <= 1 || i1 + 2 >= n_scan) {
    throw NormalizationError("radial model '" + impl->label +
                             "': radial density is not integrable (mass escapes the scan range)");
  }
  const double t_lo = -kScanHalfWidth + kScanStep * static_cast<double>(i0 - 2);
  const double t_hi = -kScanHalfWidth + kScanStep * static_cast<double>(i1 + 2);

  // Local modes of the log-radius density and their widths.
  struct Bump {
    double mode;
    double sigma;
    double height;
  };
  std::vector<Bump> bumps;
  for (std::size_t i = std::max<std::size_t>(i0, 1); i <= i1 && i + 1 < n_scan; ++i) {
    if (gs[i] < gmax - 40.0) continue;
    if (!(gs[i] >= gs[i - 1] && gs[i] > gs[i + 1])) continue;
    const double curv = (gs[i - 1] - 2.0 * gs[i] + gs[i + 1]) / (kScanStep * kScanStep);
    const double sigma = curv < 0.0 ? 1.0 / std::sqrt(-curv) : (t_hi - t_lo) / 20.0;
    bumps.push_back({-kScanHalfWidth + kScanStep * static_cast<double>(i),
                     std::max(sigma, 1e-4), gs[i]});
  }
  std::sort(bumps.begin(), bumps.end(), [](const Bump& a, const Bump& b) { return a.height > b.height; });
  if (bumps.size() > 8) bumps.resize(8);
  double sigma_min = t_hi - t_lo;
  for (const auto& b : bumps) sigma_min = std::min(sigma_min, b.sigma);

  // Fine table of cell masses.
  const double width = t_hi - t_lo;
  const auto n_cells = static_cast<std::size_t>(
      std::clamp(std::ceil(width / (sigma_min / 16.0)), 4096.0, 200000.0));
  impl->t_lo = t_lo;
  impl->n = n_cells;
  impl->h = width / static_cast<double>(n_cells);
  impl->log_z = gmax;  // provisional shift for the table pass
  std::vector<double> masses(n_cells);
  double total = 0.0;
  {
    auto f = [&](double t) { return std::exp(impl->g(t)); };
    for (std::size_t i = 0; i < n_cells; ++i) {
      const double a = t_lo + impl->h * static_cast<double>(i);
      masses[i] = quad::detail::gk15<double>(f, a, a + impl->h).value;
      total += masses[i];
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NormalizationError("radial model '" + impl->label + "': normalization integral failed");
  }
  const double log_total_table = gmax + std::log(total);
  impl->cum.assign(n_cells + 1, 0.0);
  for (std::size_t i = 0; i < n_cells; ++i) impl->cum[i + 1] = impl->cum[i] + masses[i] / total;
  impl->cum.back() = 1.0;
  impl->log_z = log_total_table;
  impl->g_edge.resize(n_cells + 1);
  for (std::size_t i = 0; i <= n_cells; ++i) {
    impl->g_edge[i] = impl->g(t_lo + impl->h * static_cast<double>(i));
  }

  // Breakpoints: quantile levels plus bump landmarks, clipped to the truncation.
  impl->ta = impl->quantile_t(kTailMass);
  impl->tb = impl->quantile_t(1.0 - kTailMass);
  std::vector<double> bp = {impl->ta, impl->tb};
  for (double q : {1e-9, 1e-6, 1e-4, 1e-2, 0.1, 0.3, 0.5, 0.7, 0.9}) {
    bp.push_back(impl->quantile_t(q));
    bp.push_back(impl->quantile_t(1.0 - q));
  }
  for (const auto& b : bumps) {
    for (double z : {0.0, -1.5, 1.5, -3.0, 3.0, -5.0, 5.0}) bp.push_back(b.mode + z * b.sigma);
  }
  std::sort(bp.begin(), bp.end());
  std::vector<double> pts;
  const double min_gap = 0.02 * sigma_min;
  for (double t : bp) {
    if (t < impl->ta || t > impl->tb) continue;
    if (!pts.empty() && t - pts.back() < min_gap) continue;
    pts.push_back(t);
  }
  if (pts.back() < impl->tb) pts.back() = impl->tb;

  // Refine the normalizer by adaptive quadrature over the full scanned range.
  {
    std::vector<double> all = pts;
    auto cells = quad::cells_between(all, t_lo, t_hi);
    auto f = [&](double t) { return std::exp(impl->g(t)); };
    quad::Options opts;
    opts.abs_tol = 0.0;
    opts.rel_tol = 1e-12;
    auto res = quad::integrate<double>(f, cells, opts);
    if (!(res.value > 0.0) || !std::isfinite(res.value)) {
      throw NormalizationError("radial model '" + impl->label + "': normalization integral failed");
    }
    if (!res.converged && res.error > 1e-10 * res.value) {
      throw NormalizationError("radial model '" + impl->label + "': normalization did not converge");
    }
    impl->log_z = log_total_table + std::log(res.value);
    impl->cum_scale = std::exp(impl->log_z - log_total_table);
  }
  for (std::size_t i = 0; i <= n_cells; ++i) {
    impl->g_edge[i] = impl->g(t_lo + impl->h * static_cast<double>(i));
  }

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double m = impl->cdf_t(pts[i + 1]) - impl->cdf_t(pts[i]);
    impl->cells.push_back({pts[i], pts[i + 1], std::max(m, 0.0)});
  }
  return RadialModel(std::move(impl));
}

int RadialModel::dimension() const { return impl_->d; }
const std::string& RadialModel::label() const { return impl_->label; }
std::optional<double> RadialModel::scale_constant() const { return impl_->k; }
double RadialModel::log_pi(double r) const { return impl_->log_pi(r); }
double RadialModel::log_normalizer() const { return impl_->log_z; }

double RadialModel::log_density(double r) const {
  if (r < 0.0) return kNegInf;
  if (r == 0.0) {
    if (impl_->d > 1) return kNegInf;
    return impl_->log_area + impl_->log_pi(0.0) - impl_->log_z;
  }
  return impl_->log_area + (impl_->d - 1) * std::log(r) + impl_->log_pi(r) - impl_->log_z;
}

double RadialModel::density(double r) const { return std::exp(log_density(r)); }

double RadialModel::log_density_log_radius(double t) const { return impl_->g(t); }

double RadialModel::cdf(double r) const {
  if (r <= 0.0) return 0.0;
  return impl_->cdf_t(std::log(r));
}

double RadialModel::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile: probability outside [0, 1]");
  double t = impl_->quantile_t(p);
  if (p <= 0.0 || p >= 1.0) return std::exp(t);
  // Newton polish on the exact distribution function of log|X|.
  for (int it = 0; it < 4; ++it) {
    const double dens = std::exp(impl_->g(t));
    if (!(dens > 0.0)) break;
    const double step = (impl_->cdf_t(t) - p) / dens;
    t -= step;
    if (std::fabs(step) < 1e-14 * std::max(1.0, std::fabs(t))) break;
  }
  return std::exp(t);
}

double RadialModel::support_lo() const { return std::exp(impl_->ta); }
double RadialModel::support_hi() const { return std::exp(impl_->tb); }

std::span<const RadialModel::Cell> RadialModel::log_cells() const { return impl_->cells; }

double RadialModel::moment(double power) const {
  std::vector<quad::Interval> cells;
  for (const auto& c : impl_->cells) cells.push_back({c.lo, c.hi});
  auto f = [&](double t) { return std::exp(impl_->g(t) + power * t); };
  quad::Options opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-12;
  auto res = quad::integrate<double>(f, cells, opts);
  if (!res.converged) throw QuadratureError("moment: quadrature did not converge");
  return res.value;
}

double RadialModel::sample_one(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  const auto& cum = impl_->cum;
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  std::size_t i = static_cast<std::size_t>(std::distance(cum.begin(), it));
  i = std::clamp<std::size_t>(i, 1, impl_->n) - 1;
  const double m = cum[i + 1] - cum[i];
  const double frac = m > 0.0 ? std::clamp((u - cum[i]) / m, 0.0, 1.0) : 0.5;
  return std::exp(impl_->within_cell(i, frac));
}

std::vector<double> RadialModel::sample(std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& r : out) r = sample_one(rng);
  return out;
}

// ---------------------------------------------------------------------------
// Example families

RadialModel::LogFn family_log_pi(const TargetFamily& family, int d) {
  const double dm1 = d - 1;
  switch (family.kind) {
    case FamilyKind::Gaussian: return [](double r) { return -0.5 * r * r; };
    case FamilyKind::Exponential: return [](double r) { return -r; };
    case FamilyKind::RadialGaussian:
      return [dm1](double r) { return -dm1 * std::log(r) - 0.5 * r * r; };
    case FamilyKind::RadialExponential: return [dm1](double r) { return -dm1 * std::log(r) - r; };
    case FamilyKind::UnimodalLognormal: {
      const double splice = -dm1;  // log of the splice radius e^{-(d-1)}
      return [dm1, splice](double r) {
        const double lr = std::log(r);
        if (lr <= splice) return 0.0;
        const double z = lr + dm1;
        return -0.5 * z * z;
      };
    }
    case FamilyKind::GaussianMixture: {
      if (d < 2) throw InvalidParameter("mixture targets require d >= 2");
      const double p = family.mixture_weight(d);
      if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("mixture: weight must lie in (0, 1)");
      const double dd = d;
      const double log_w1 = std::log1p(-p);
      const double log_w2 = std::log(p) - dd * std::log(dd);
      const double inv_scale2 = 1.0 / (dd * dd);
      return [log_w1, log_w2, inv_scale2](double r) {
        const double r2 = r * r;
        return log_add(log_w1 - 0.5 * r2, log_w2 - 0.5 * r2 * inv_scale2);
      };
    }
    case FamilyKind::CustomRadialTable: {
      if (!family.table) throw InvalidParameter("custom family without a table");
      auto table = family.table;
      return [table](double r) { return (*table)(r); };
    }
  }
  throw InvalidParameter("unknown target family");
}

RadialModel build_example_target(const TargetFamily& family, int d) {
  if (d < 1) throw InvalidParameter("dimension must be >= 1");
  return RadialModel::from_density(d, family_log_pi(family, d), family.name(),
                                   family.scale_constant(d));
}

}  // namespace rwm
