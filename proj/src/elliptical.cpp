#include "rwm/elliptical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "rwm/error.hpp"
#include "rwm/parallel.hpp"

namespace rwm {

namespace {

constexpr std::size_t kStreams = 16;
constexpr double kEccentricityFlat = -0.1;
constexpr double kDeviationDecay = -0.25;

// Least-squares slope of log(y) against log(d) over the last three rows.
template <class Row, class Get>
double tail_log_slope(const std::vector<Row>& rows, Get get) {
  const std::size_t n = rows.size();
  const std::size_t k = std::min<std::size_t>(3, n);
  if (k < 2) return 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = n - k; i < n; ++i) {
    const double x = std::log(static_cast<double>(rows[i].d));
    const double y = std::log(std::max(get(rows[i]), 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(k);
  const double den = m * sxx - sx * sx;
  return den > 0.0 ? (m * sxy - sx * sy) / den : 0.0;
}

// Spherical EAR / ESJD in log lambda, tabulated on a uniform grid and
// interpolated as log-values with a cubic B-spline.
class SphericalTable {
 public:
  SphericalTable(const RadialModel& core, const RadialModel& proposal, double lambda_lo, double lambda_hi,
                 int nodes_per_decade, const EngineOptions& eo) {
    lo_ = std::log(lambda_lo);
    const double hi = std::log(lambda_hi);
    const std::size_t n = std::max<std::size_t>(
        8, static_cast<std::size_t>(std::ceil((hi - lo_) / std::log(10.0) * nodes_per_decade)) + 1);
    step_ = (hi - lo_) / static_cast<double>(n - 1);
    std::vector<double> lambdas(n);
    for (std::size_t i = 0; i < n; ++i) lambdas[i] = std::exp(lo_ + step_ * static_cast<double>(i));
    const auto c = curve(core, proposal, lambdas, eo);
    std::vector<double> le(n), ls(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!c.points[i].converged) throw QuadratureError("elliptical: spherical curve failed: " + c.points[i].error);
      le[i] = std::log(std::max(c.points[i].ear, 1e-300));
      ls[i] = std::log(std::max(c.points[i].esjd, 1e-300));
    }
    hi_ = lo_ + step_ * static_cast<double>(n - 1);
    ear_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(le.data(), n, lo_, step_);
    esjd_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(ls.data(), n, lo_, step_);
  }

  std::pair<double, double> at(double log_lambda) const {
    const double u = std::clamp(log_lambda, lo_, hi_);
    return {std::exp(ear_(u)), std::exp(esjd_(u))};
  }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  double step_ = 0.0;
  boost::math::interpolators::cardinal_cubic_b_spline<double> ear_;
  boost::math::interpolators::cardinal_cubic_b_spline<double> esjd_;
};

bool is_isotropic(const EllipticalSpec& spec) { return spec.nu_max() - spec.nu_min() <= 1e-12 * spec.nu_max(); }

EllipticalValue average_over(const SphericalTable& table, std::span<const double> log_w, double lambda) {
  const double l = std::log(lambda);
  double me = 0.0, ms = 0.0, qe = 0.0, qs = 0.0;
  std::size_t k = 0;
  for (double v : log_w) {
    const auto [e, s] = table.at(l + v);
    ++k;
    const double de = e - me;
    me += de / static_cast<double>(k);
    qe += de * (e - me);
    const double ds = s - ms;
    ms += ds / static_cast<double>(k);
    qs += ds * (s - ms);
  }
  const double n = static_cast<double>(k);
  return {me, ms, std::sqrt(qe / (n - 1.0) / n), std::sqrt(qs / (n - 1.0) / n)};
}

std::vector<double> log_stretch(const EllipticalSpec& spec, const EllipticalOptions& opts) {
  auto w = sample_direction_stretch(spec.eigenvalues(), opts.directions, opts.seed);
  for (auto& x : w) x = std::log(x);
  return w;
}

}  // namespace

EigenRule EigenRule::constant(double c) {
  if (!(c > 0.0)) throw InvalidParameter("eigenvalue rule: const:c needs c > 0");
  EigenRule r;
  r.kind = Kind::Const;
  r.c = c;
  return r;
}

EigenRule EigenRule::iota() {
  EigenRule r;
  r.kind = Kind::Iota;
  return r;
}

EigenRule EigenRule::spike(double c, bool with_d) {
  if (!with_d && !(c > 0.0)) throw InvalidParameter("eigenvalue rule: spike:c needs c > 0");
  EigenRule r;
  r.kind = Kind::Spike;
  r.c = c;
  r.spike_scales_with_d = with_d;
  return r;
}

EigenRule EigenRule::list(std::vector<double> values, std::string source) {
  if (values.empty()) throw InvalidParameter("eigenvalue list is empty");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter("eigenvalues must be positive and finite");
  }
  EigenRule r;
  r.kind = Kind::List;
  r.values = std::move(values);
  r.source = std::move(source);
  return r;
}

std::vector<double> EigenRule::eigenvalues(int d) const {
  if (d < 1) throw InvalidParameter("eigenvalues: d must be >= 1");
  switch (kind) {
    case Kind::Const:
      return std::vector<double>(d, c);
    case Kind::Iota: {
      std::vector<double> v(d);
      std::iota(v.begin(), v.end(), 1.0);
      return v;
    }
    case Kind::Spike: {
      std::vector<double> v(d, 1.0);
      v.back() = spike_scales_with_d ? static_cast<double>(d) : c;
      return v;
    }
    case Kind::List:
      if (static_cast<std::size_t>(d) != values.size()) {
        throw InvalidParameter("eigenvalue list has " + std::to_string(values.size()) + " entries, d = " +
                               std::to_string(d));
      }
      return values;
  }
  return {};
}

std::string EigenRule::name() const {
  switch (kind) {
    case Kind::Const:
      return "const:" + std::to_string(c);
    case Kind::Iota:
      return "iota";
    case Kind::Spike:
      return spike_scales_with_d ? std::string("spike:d") : "spike:" + std::to_string(c);
    case Kind::List:
      return "file:" + source;
  }
  return "";
}

EllipticalSpec::EllipticalSpec(std::vector<double> eigenvalues, RadialModel core, RadialModel proposal)
    : nu_(std::move(eigenvalues)), core_(std::move(core)), proposal_(std::move(proposal)) {
  if (nu_.empty()) throw InvalidParameter("elliptical: no eigenvalues");
  if (core_.dimension() != dimension() || proposal_.dimension() != dimension()) {
    throw InvalidParameter("elliptical: eigenvalue count must match the core and proposal dimension");
  }
  double s = 0.0;
  nu_max_ = 0.0;
  nu_min_ = std::numeric_limits<double>::infinity();
  for (double v : nu_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidParameter("elliptical: eigenvalues must be > 0");
    s += v * v;
    nu_max_ = std::max(nu_max_, v);
    nu_min_ = std::min(nu_min_, v);
  }
  mean_square_ = s / static_cast<double>(nu_.size());
}

EccentricityReport eccentricity_condition(const EigenRule& rule, std::span<const int> dims) {
  EccentricityReport rep;
  for (int d : dims) {
    const auto nu = rule.eigenvalues(d);
    double s = 0.0, m = 0.0;
    for (double v : nu) {
      s += v * v;
      m = std::max(m, v);
    }
    rep.rows.push_back({d, m * m / s});
  }
  rep.slope = tail_log_slope(rep.rows, [](const EccentricityRow& r) { return r.ratio; });
  rep.satisfied = rep.rows.size() >= 2 && rep.slope <= kEccentricityFlat;
  return rep;
}

std::vector<double> sample_direction_stretch(std::span<const double> eigenvalues, std::size_t n,
                                             std::uint64_t seed) {
  std::vector<double> w(n);
  const std::size_t d = eigenvalues.size();
  parallel_for(kStreams, [&](std::size_t s) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ull * (s + 1));
    std::normal_distribution<double> z;
    const std::size_t begin = n * s / kStreams;
    const std::size_t end = n * (s + 1) / kStreams;
    for (std::size_t i = begin; i < end; ++i) {
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double x = z(rng);
        den += x * x;
        num += eigenvalues[j] * eigenvalues[j] * x * x;
      }
      w[i] = std::sqrt(num / den);
    }
  });
  return w;
}

EllipticalValue elliptical_ear_esjd(const EllipticalSpec& spec, double lambda, const EllipticalOptions& opts) {
  if (!(lambda > 0.0)) throw DomainError("elliptical_ear_esjd: lambda must be > 0");
  if (is_isotropic(spec)) {
    const auto r = ear_esjd(spec.core(), spec.proposal(), lambda * spec.nu_max(), opts.engine);
    return {r.ear, r.esjd, 0.0, 0.0};
  }
  if (opts.directions < 2) throw InvalidParameter("elliptical_ear_esjd: need >= 2 directions");
  const SphericalTable table(spec.core(), spec.proposal(), lambda * spec.nu_min(), lambda * spec.nu_max(),
                             opts.nodes_per_decade, opts.engine);
  return average_over(table, log_stretch(spec, opts), lambda);
}

EllipticalAos elliptical_aos(const EllipticalSpec& spec, double mu_hat, double k_x_star, double k_y,
                             const EccentricityReport* report) {
  if (!(k_x_star > 0.0) || !(k_y > 0.0)) throw InvalidParameter("elliptical_aos: bad scale constants");
  EllipticalAos out;
  out.nu_bar = std::sqrt(spec.mean_square());
  out.k_y_star = out.nu_bar * k_y;
  out.lambda_hat = aos(mu_hat, k_x_star, k_y, spec.dimension()) / out.nu_bar;
  if (report && !report->satisfied) {
    out.condition_violated = true;
    out.warning = "eccentricity condition violated: nu_max^2 / sum nu_i^2 does not tend to 0";
  }
  return out;
}

ScalingOptimum elliptical_optimize(const EllipticalSpec& spec, const SearchOptions& search,
                                   const EllipticalOptions& opts) {
  if (!(search.lambda_lo > 0.0) || !(search.lambda_hi > search.lambda_lo)) {
    throw InvalidParameter("elliptical_optimize: search range must satisfy 0 < lo < hi");
  }
  if (search.grid_size < 64) throw InvalidParameter("elliptical_optimize: grid size must be >= 64");
  const SphericalTable table(spec.core(), spec.proposal(), search.lambda_lo * spec.nu_min(),
                             search.lambda_hi * spec.nu_max(), opts.nodes_per_decade, opts.engine);
  std::vector<double> log_w;
  if (is_isotropic(spec)) {
    log_w = {std::log(spec.nu_max()), std::log(spec.nu_max())};
  } else {
    log_w = log_stretch(spec, opts);
  }
  auto eval = [&](double u) { return average_over(table, log_w, std::exp(u)); };

  const auto grid = log_grid(search.lambda_lo, search.lambda_hi, search.grid_size);
  std::vector<EllipticalValue> vals(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { vals[i] = eval(std::log(grid[i])); });

  const std::size_t n = grid.size();
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (vals[i].esjd > vals[best].esjd) best = i;
  }
  if (best == 0 || best == n - 1) throw NoInteriorMaximum("elliptical_optimize: ESJD argmax at a range boundary");

  ScalingOptimum out;
  out.grid_best_esjd = vals[best].esjd;
  out.lambda_lo = search.lambda_lo;
  out.lambda_hi = search.lambda_hi;
  out.grid_size = search.grid_size;
  constexpr double kInvPhi = 0.6180339887498949;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(vals[i].esjd > vals[i - 1].esjd && vals[i].esjd >= vals[i + 1].esjd)) continue;
    if (vals[i].esjd < search.negligible_peak * out.grid_best_esjd) continue;
    double a = std::log(grid[i - 1]);
    double b = std::log(grid[i + 1]);
    double bu = std::log(grid[i]);
    EllipticalValue bv = vals[i];
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    EllipticalValue f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 200 && b - a > search.rel_tol; ++it) {
      if (f1.esjd >= f2.esjd) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kInvPhi * (b - a);
        f1 = eval(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kInvPhi * (b - a);
        f2 = eval(x2);
      }
      if (f1.esjd > bv.esjd) bv = f1, bu = x1;
      if (f2.esjd > bv.esjd) bv = f2, bu = x2;
    }
    out.local_maxima.push_back({std::exp(bu), bv.ear, bv.esjd});
  }
  double top = 0.0;
  for (const auto& m : out.local_maxima) top = std::max(top, m.esjd);
  for (std::size_t i = 0; i < out.local_maxima.size(); ++i) {
    if (out.local_maxima[i].esjd >= top * (1.0 - search.tie_rel_tol)) {
      out.argmax_index = i;
      break;
    }
  }
  const auto& m = out.local_maxima.at(out.argmax_index);
  out.lambda_hat = m.lambda;
  out.ear_hat = m.ear;
  out.esjd_hat = m.esjd;
  return out;
}

StretchDeviationReport lemma5_numeric_check(const EigenRule& rule, std::span<const int> dims, std::size_t samples,
                                  std::uint64_t seed) {
  if (samples < 2) throw InvalidParameter("lemma5_numeric_check: need >= 2 samples");
  StretchDeviationReport rep;
  for (int d : dims) {
    const auto nu = rule.eigenvalues(d);
    double ms = 0.0;
    for (double v : nu) ms += v * v;
    ms /= d;
    std::vector<double> dev(samples);
    parallel_for(kStreams, [&](std::size_t s) {
      std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ull * (s + 1) + static_cast<std::uint64_t>(d));
      std::normal_distribution<double> z;
      for (std::size_t i = samples * s / kStreams; i < samples * (s + 1) / kStreams; ++i) {
        double q = 0.0;
        for (double v : nu) {
          const double x = z(rng);
          q += v * v * x * x;
        }
        const double e = std::sqrt(q / d / ms) - 1.0;
        dev[i] = e * e;
      }
    });
    double mean = 0.0;
    for (double x : dev) mean += x;
    mean /= static_cast<double>(samples);
    double var = 0.0;
    for (double x : dev) var += (x - mean) * (x - mean);
    var /= static_cast<double>(samples - 1);
    rep.rows.push_back({d, mean, std::sqrt(var / static_cast<double>(samples))});
  }
  rep.slope = tail_log_slope(rep.rows, [](const StretchDeviationRow& r) { return r.msd; });
  rep.decreasing = rep.rows.size() >= 2 && rep.slope <= kDeviationDecay;
  return rep;
}

}  // namespace rwm
