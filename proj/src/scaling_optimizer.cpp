#include "rwm/scaling_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "rwm/error.hpp"

namespace rwm {

namespace {

struct Probe {
  double u;  // log lambda
  double ear;
  double esjd;
};

Probe evaluate(const RadialModel& target, const RadialModel& proposal, double u, const EngineOptions& eo) {
  const auto r = ear_esjd(target, proposal, std::exp(u), eo);
  return {u, r.ear, r.esjd};
}

// Golden-section maximization of ESJD in log lambda over [a, b] with the
// interior point c already known to dominate both ends. Returns the best
// probe seen, so the result never falls below `centre`.
Probe golden_refine(const RadialModel& target, const RadialModel& proposal, double a, double b,
                    const Probe& centre, const SearchOptions& opts) {
  constexpr double kInvPhi = 0.6180339887498949;
  Probe best = centre;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  Probe p1 = evaluate(target, proposal, x1, opts.engine);
  Probe p2 = evaluate(target, proposal, x2, opts.engine);
  for (int it = 0; it < 200 && (b - a) > opts.rel_tol; ++it) {
    if (p1.esjd > best.esjd) best = p1;
    if (p2.esjd > best.esjd) best = p2;
    if (p1.esjd >= p2.esjd) {
      b = x2;
      x2 = x1;
      p2 = p1;
      x1 = b - kInvPhi * (b - a);
      p1 = evaluate(target, proposal, x1, opts.engine);
    } else {
      a = x1;
      x1 = x2;
      p1 = p2;
      x2 = a + kInvPhi * (b - a);
      p2 = evaluate(target, proposal, x2, opts.engine);
    }
  }
  if (p1.esjd > best.esjd) best = p1;
  if (p2.esjd > best.esjd) best = p2;
  return best;
}

}  // namespace

ScalingOptimum optimize(const RadialModel& target, const RadialModel& proposal, const SearchOptions& opts) {
  if (!(opts.lambda_lo > 0.0) || !(opts.lambda_hi > opts.lambda_lo) || !std::isfinite(opts.lambda_hi)) {
    throw InvalidParameter("optimize: search range must satisfy 0 < lo < hi");
  }
  if (opts.grid_size < 64) throw InvalidParameter("optimize: grid size must be >= 64");

  const auto grid = log_grid(opts.lambda_lo, opts.lambda_hi, opts.grid_size);
  const auto c = curve(target, proposal, grid, opts.engine);
  const auto& pts = c.points;
  const std::size_t n = pts.size();
  auto valid = [&](std::size_t i) { return pts[i].converged && std::isfinite(pts[i].esjd); };

  std::size_t best = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (valid(i) && (best == n || pts[i].esjd > pts[best].esjd)) best = i;
  }
  if (best == n) throw QuadratureError("optimize: no grid point evaluated successfully");
  if (best == 0 || best == n - 1) {
    throw NoInteriorMaximum("optimize: ESJD argmax at the " + std::string(best == 0 ? "lower" : "upper") +
                            " end of [" + std::to_string(opts.lambda_lo) + ", " +
                            std::to_string(opts.lambda_hi) + "]");
  }
  const double grid_best = pts[best].esjd;

  ScalingOptimum out;
  out.grid_best_esjd = grid_best;
  out.lambda_lo = opts.lambda_lo;
  out.lambda_hi = opts.lambda_hi;
  out.grid_size = opts.grid_size;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!valid(i) || !valid(i - 1) || !valid(i + 1)) continue;
    const double f = pts[i].esjd;
    if (!(f > pts[i - 1].esjd && f >= pts[i + 1].esjd)) continue;
    if (f < opts.negligible_peak * grid_best) continue;
    const Probe centre{std::log(pts[i].lambda), pts[i].ear, f};
    const Probe p = golden_refine(target, proposal, std::log(pts[i - 1].lambda), std::log(pts[i + 1].lambda),
                                  centre, opts);
    out.local_maxima.push_back({std::exp(p.u), p.ear, p.esjd});
  }
  if (out.local_maxima.empty()) throw NoInteriorMaximum("optimize: no interior local maximum");

  double top = 0.0;
  for (const auto& m : out.local_maxima) top = std::max(top, m.esjd);
  for (std::size_t i = 0; i < out.local_maxima.size(); ++i) {
    if (out.local_maxima[i].esjd >= top * (1.0 - opts.tie_rel_tol)) {
      out.argmax_index = i;
      break;
    }
  }
  const auto& m = out.local_maxima[out.argmax_index];
  out.lambda_hat = m.lambda;
  out.ear_hat = m.ear;
  out.esjd_hat = m.esjd;
  return out;
}

std::vector<int> DimensionSweep::dims() const {
  std::vector<int> d;
  d.reserve(rows.size());
  for (const auto& r : rows) d.push_back(r.d);
  return d;
}

namespace {

std::optional<AsymptoticOptimum> cached_aots(const TargetFamily& target) {
  // Limits depend only on the family kind, so a small cache avoids re-solving per dimension.
  static std::mutex mu;
  static std::map<FamilyKind, std::optional<AsymptoticOptimum>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(target.kind);
  if (it != cache.end()) return it->second;
  std::optional<AsymptoticOptimum> result;
  if (const auto R = limiting_mixing(target)) {
    auto opt = solve_aots(*R);
    if (opt.finite) result = opt;
  }
  cache.emplace(target.kind, result);
  return result;
}

}  // namespace

std::optional<double> predicted_optimal_scale(const TargetFamily& target, const TargetFamily& proposal, int d) {
  const auto kx = target.scale_constant(d);
  const auto ky = proposal.scale_constant(d);
  if (!kx || !ky) return std::nullopt;
  const auto opt = cached_aots(target);
  if (!opt) return std::nullopt;
  return aos(opt->mu_hat, *kx, *ky, d);
}

DimensionSweep sweep_dimension(const TargetFamily& target, const TargetFamily& proposal,
                               std::span<const int> dims, const SweepOptions& opts) {
  for (std::size_t i = 1; i < dims.size(); ++i) {
    if (dims[i] <= dims[i - 1]) throw InvalidParameter("sweep: dims must be strictly increasing");
  }
  if (opts.grid_size < 64) throw InvalidParameter("sweep: grid size must be >= 64");

  DimensionSweep sweep;
  sweep.target = target.name();
  sweep.proposal = proposal.name();
  sweep.asymptote = cached_aots(target);
  const double width = std::pow(10.0, opts.decades);

  for (int d : dims) {
    SweepRow row;
    row.d = d;
    row.k_x = target.scale_constant(d);
    row.k_y = proposal.scale_constant(d);
    try {
      const RadialModel tm = build_example_target(target, d);
      const RadialModel pm = build_example_target(proposal, d);
      row.predicted_lambda = predicted_optimal_scale(target, proposal, d);

      SearchOptions so = opts.search;
      so.grid_size = opts.grid_size;
      if (row.predicted_lambda) {
        so.lambda_lo = *row.predicted_lambda / width;
        so.lambda_hi = *row.predicted_lambda * width;
        // The second mixture component lives on a scale d times larger.
        if (target.kind == FamilyKind::GaussianMixture) so.lambda_hi *= d;
      }
      const double points_per_decade =
          static_cast<double>(so.grid_size - 1) / std::log10(so.lambda_hi / so.lambda_lo);
      for (int attempt = 0;; ++attempt) {
        try {
          row.optimum = optimize(tm, pm, so);
          break;
        } catch (const NoInteriorMaximum&) {
          if (attempt >= opts.max_expansions) throw;
          // Extend by two decades on both sides at the same density.
          so.lambda_lo /= 100.0;
          so.lambda_hi *= 100.0;
          so.grid_size = static_cast<std::size_t>(
              std::ceil(points_per_decade * std::log10(so.lambda_hi / so.lambda_lo))) + 1;
        }
      }
    } catch (const std::exception& e) {
      row.optimum.reset();
      row.status = e.what();
    }
    sweep.rows.push_back(std::move(row));
  }
  return sweep;
}

const char* to_string(DriftClass c) {
  switch (c) {
    case DriftClass::BoundedArgmax:
      return "bounded-argmax";
    case DriftClass::DriftingArgmax:
      return "drifting-argmax";
    case DriftClass::PeakSwap:
      return "peak-swap";
  }
  return "unknown";
}

DriftReport peak_drift_diagnostic(const DimensionSweep& sweep) {
  DriftReport rep;
  for (const auto& row : sweep.rows) {
    if (!row.optimum || !row.k_x || !row.k_y) continue;
    DriftRow dr;
    dr.d = row.d;
    for (const auto& m : row.optimum->local_maxima) {
      dr.mu_maxima.push_back(transformed_scale(m.lambda, row.d, *row.k_x, *row.k_y));
      dr.esjd_maxima.push_back(m.esjd);
    }
    dr.mu_hat = dr.mu_maxima[row.optimum->argmax_index];
    dr.global_on_left = row.optimum->argmax_index == 0;
    rep.rows.push_back(std::move(dr));
  }
  const std::size_t n = rep.rows.size();
  if (n == 0) return rep;

  const auto& last = rep.rows.back();
  bool increasing = n >= 3;
  for (std::size_t i = (n >= 3 ? n - 2 : n); i < n; ++i) {
    if (!(rep.rows[i].mu_hat > rep.rows[i - 1].mu_hat)) increasing = false;
  }
  // Reference scale: the limiting optimum when known, else the first row's smallest peak.
  const double ref = sweep.asymptote ? sweep.asymptote->mu_hat : rep.rows.front().mu_maxima.front();
  const bool drifting = increasing && last.mu_hat > 3.0 * ref;
  bool swapped = false;
  for (std::size_t i = 1; i < n; ++i) {
    if (rep.rows[i].global_on_left != rep.rows[i - 1].global_on_left) swapped = true;
  }
  if (drifting) {
    rep.classification = DriftClass::DriftingArgmax;
  } else if (swapped) {
    rep.classification = DriftClass::PeakSwap;
  } else {
    rep.classification = DriftClass::BoundedArgmax;
  }
  return rep;
}

}  // namespace rwm
