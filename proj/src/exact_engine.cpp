#include "rwm/exact_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "rwm/error.hpp"
#include "rwm/parallel.hpp"
#include "rwm/special_functions.hpp"

namespace rwm {

namespace {

constexpr double kNegligibleMass = 1e-17;

// Cells of the target's log-radius support restricted to t > lo, split at
// the extra landmark when it falls inside a cell.
std::vector<quad::Interval> clipped_cells(std::span<const RadialModel::Cell> cells, double lo,
                                          double landmark, double weight_scale) {
  std::vector<quad::Interval> out;
  out.reserve(cells.size() + 2);
  for (const auto& c : cells) {
    if (c.hi <= lo) continue;
    if (c.mass * weight_scale < kNegligibleMass) continue;
    const double a = std::max(c.lo, lo);
    if (landmark > a && landmark < c.hi) {
      out.push_back({a, landmark});
      out.push_back({landmark, c.hi});
    } else {
      out.push_back({a, c.hi});
    }
  }
  return out;
}

struct InnerResult {
  double value;
  double error;
  std::size_t evaluations;
  bool converged;
};

// H(s) = E[K_d(s / |X|)] over x > s.
InnerResult kernel_tail(const RadialModel& target, const ProjectionKernel& kernel, double s,
                        const EngineOptions& opts) {
  if (s <= 0.0) return {1.0, 0.0, 0, true};
  const double ls = std::log(s);
  const auto cells = clipped_cells(target.log_cells(), ls, ls + std::numbers::ln2, 1.0);
  if (cells.empty()) return {0.0, 0.0, 0, true};
  auto f = [&](double t) {
    const double x = std::exp(t);
    return std::exp(target.log_density_log_radius(t)) * kernel(std::min(1.0, s / x));
  };
  quad::Options qo;
  qo.abs_tol = opts.inner_abs_tol;
  qo.rel_tol = opts.inner_rel_tol;
  qo.max_evals = opts.max_evals;
  auto res = quad::integrate<double>(f, cells, qo);
  return {std::clamp(res.value, 0.0, 1.0), res.error, res.evaluations, res.converged};
}

void require_same_dimension(const RadialModel& target, const RadialModel& proposal) {
  if (target.dimension() != proposal.dimension()) {
    throw InvalidParameter("target dimension " + std::to_string(target.dimension()) +
                           " differs from proposal dimension " +
                           std::to_string(proposal.dimension()));
  }
}

}  // namespace

double tail_kernel_mean(const RadialModel& target, double s, const EngineOptions& opts) {
  if (!(s >= 0.0)) throw DomainError("tail_kernel_mean: s must be non-negative");
  const ProjectionKernel kernel(target.dimension());
  auto r = kernel_tail(target, kernel, s, opts);
  if (!r.converged && r.error > 10.0 * opts.inner_abs_tol) {
    throw QuadratureError("marginal CDF: quadrature tolerance not met");
  }
  return r.value;
}

double marginal_cdf(const RadialModel& target, double x1, const EngineOptions& opts) {
  if (!std::isfinite(x1)) {
    if (std::isnan(x1)) throw DomainError("marginal_cdf: NaN argument");
    return x1 > 0.0 ? 1.0 : 0.0;
  }
  if (x1 == 0.0) return 0.5;
  const double half_tail = 0.5 * tail_kernel_mean(target, std::fabs(x1), opts);
  return x1 < 0.0 ? half_tail : 1.0 - half_tail;
}

EarEsjd ear_esjd(const RadialModel& target, const RadialModel& proposal, double lambda,
                 const EngineOptions& opts) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("ear/esjd: lambda must be positive and finite");
  }
  require_same_dimension(target, proposal);
  const ProjectionKernel kernel(target.dimension());

  // Beyond y = 2 x_max / lambda the inner integral vanishes.
  const double y_cut = std::log(2.0 * target.support_hi() / lambda);
  std::vector<quad::Interval> cells;
  for (const auto& c : proposal.log_cells()) {
    if (c.lo >= y_cut) break;
    const double y_hi = std::exp(std::min(c.hi, y_cut));
    if (c.mass * std::max(1.0, y_hi * y_hi) < kNegligibleMass) continue;
    cells.push_back({c.lo, std::min(c.hi, y_cut)});
  }

  std::size_t inner_evals = 0;
  bool inner_ok = true;
  auto f = [&](double t) -> std::array<double, 2> {
    const double y = std::exp(t);
    const double w = std::exp(proposal.log_density_log_radius(t));
    if (w == 0.0) return {0.0, 0.0};
    const auto inner = kernel_tail(target, kernel, 0.5 * lambda * y, opts);
    inner_evals += inner.evaluations;
    if (!inner.converged) inner_ok = false;
    const double v = w * inner.value;
    return {v, v * y * y};
  };
  quad::Options qo;
  qo.abs_tol = opts.outer_abs_tol;
  qo.rel_tol = opts.outer_rel_tol;
  qo.max_evals = opts.max_evals;
  auto res = quad::integrate<std::array<double, 2>>(f, cells, qo);

  EarEsjd out;
  const double l2 = lambda * lambda;
  out.ear = std::clamp(res.value[0], 0.0, 1.0);
  out.esjd = std::max(0.0, l2 * res.value[1]);
  out.ear_error = res.error[0];
  out.esjd_error = l2 * res.error[1];
  out.evaluations = res.evaluations + inner_evals;
  out.converged = res.converged && inner_ok && out.evaluations <= opts.max_evals;
  if (!out.converged) {
    throw QuadratureError("ear/esjd: quadrature tolerance not met at lambda = " +
                          std::to_string(lambda) + " (" + std::to_string(out.evaluations) +
                          " evaluations)");
  }
  return out;
}

double ear(const RadialModel& target, const RadialModel& proposal, double lambda,
           const EngineOptions& opts) {
  return ear_esjd(target, proposal, lambda, opts).ear;
}

double esjd(const RadialModel& target, const RadialModel& proposal, double lambda,
            const EngineOptions& opts) {
  return ear_esjd(target, proposal, lambda, opts).esjd;
}

std::vector<std::pair<double, double>> ScalingCurve::parametric() const {
  std::vector<std::pair<double, double>> out;
  out.reserve(points.size());
  for (const auto& p : points) out.emplace_back(p.ear, p.esjd);
  return out;
}

ScalingCurve curve(const RadialModel& target, const RadialModel& proposal,
                   std::span<const double> lambdas, const EngineOptions& opts) {
  require_same_dimension(target, proposal);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw DomainError("curve: lambda grid must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) {
      throw DomainError("curve: lambda grid must be strictly increasing");
    }
  }
  ScalingCurve c;
  c.target = target.label();
  c.proposal = proposal.label();
  c.dimension = target.dimension();
  c.points.resize(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    CurvePoint& p = c.points[i];
    p.lambda = lambdas[i];
    try {
      const auto r = ear_esjd(target, proposal, lambdas[i], opts);
      p.ear = r.ear;
      p.esjd = r.esjd;
      p.converged = true;
    } catch (const QuadratureError& e) {
      p.ear = std::nan("");
      p.esjd = std::nan("");
      p.converged = false;
      p.error = e.what();
    }
  });
  return c;
}

ClosedForm closed_form_gaussian_1d(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("closed form: lambda must be positive");
  const double at = std::atan(2.0 / lambda);
  const double ear = 2.0 / std::numbers::pi * at;
  const double esjd =
      2.0 * lambda * lambda / std::numbers::pi * (at - 2.0 * lambda / (lambda * lambda + 4.0));
  return {ear, esjd};
}

ClosedForm closed_form_laplace_1d(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("closed form: lambda must be positive");
  const double s = lambda + 2.0;
  return {2.0 / s, 16.0 * lambda * lambda / (s * s * s)};
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

}  // namespace rwm
