#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwm/asymptotics.hpp"
#include "rwm/exact_engine.hpp"
#include "rwm/target_models.hpp"

namespace rwm {

struct SearchOptions {
  double lambda_lo = 1e-3;
  double lambda_hi = 1e3;
  std::size_t grid_size = 512;
  double rel_tol = 1e-5;       // golden-section stop, relative in lambda
  double tie_rel_tol = 1e-6;   // maxima this close in ESJD count as tied
  double negligible_peak = 1e-6;  // local maxima below this fraction of the best are noise
  EngineOptions engine;
};

struct LocalMaximum {
  double lambda = 0.0;
  double ear = 0.0;
  double esjd = 0.0;
};

struct ScalingOptimum {
  double lambda_hat = 0.0;
  double ear_hat = 0.0;
  double esjd_hat = 0.0;
  std::vector<LocalMaximum> local_maxima;  // ascending lambda
  std::size_t argmax_index = 0;
  std::string canonical_rule = "smallest-lambda-among-argmax";
  double grid_best_esjd = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  std::size_t grid_size = 0;
};

/// Global ESJD maximizer over a log grid with golden-section refinement of
/// every bracketed local maximum. Throws NoInteriorMaximum when the grid
/// argmax sits on either end of the range.
ScalingOptimum optimize(const RadialModel& target, const RadialModel& proposal,
                        const SearchOptions& opts = {});

struct SweepOptions {
  std::size_t grid_size = 128;
  double decades = 2.0;      // half-width around the predicted optimum
  int max_expansions = 3;    // extra decades added on a boundary argmax
  SearchOptions search;      // lambda range used when no prediction exists
};

struct SweepRow {
  int d = 0;
  std::optional<ScalingOptimum> optimum;
  std::optional<double> predicted_lambda;
  std::optional<double> k_x;
  std::optional<double> k_y;
  std::string status = "ok";
};

struct DimensionSweep {
  std::string target;
  std::string proposal;
  std::vector<SweepRow> rows;
  std::optional<AsymptoticOptimum> asymptote;

  std::vector<int> dims() const;
};

/// Asymptotic line lambda_d = 2 mu_hat k_x / (sqrt(d) k_y), when all pieces are known.
std::optional<double> predicted_optimal_scale(const TargetFamily& target, const TargetFamily& proposal, int d);

DimensionSweep sweep_dimension(const TargetFamily& target, const TargetFamily& proposal,
                               std::span<const int> dims, const SweepOptions& opts = {});

enum class DriftClass { BoundedArgmax, DriftingArgmax, PeakSwap };

const char* to_string(DriftClass c);

struct DriftRow {
  int d = 0;
  std::vector<double> mu_maxima;    // ascending
  std::vector<double> esjd_maxima;
  double mu_hat = 0.0;
  bool global_on_left = true;  // global max is the smallest-mu peak
};

struct DriftReport {
  std::vector<DriftRow> rows;
  DriftClass classification = DriftClass::BoundedArgmax;
};

/// Needs k_x and k_y on every usable row; rows without an optimum are skipped.
DriftReport peak_drift_diagnostic(const DimensionSweep& sweep);

}  // namespace rwm
