#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwm/asymptotics.hpp"
#include "rwm/exact_engine.hpp"
#include "rwm/target_models.hpp"

namespace rwm {

struct ChainOptions {
  std::size_t n_iters = 1'000'000;
  std::size_t burn_in = 0;  // 0 means 10% of n_iters
  std::uint64_t seed = 1;
  std::size_t batches = 50;
  /// Diagonal of the sphering map T; empty means spherical (T = I).
  std::vector<double> eigenvalues;
};

struct ChainStats {
  std::size_t n_iters = 0;
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  Estimate accept_rate;
  Estimate esjd;  // mean |T (X' - X)|^2 per iteration
  /// Mean of |T X|^2 over the chain divided by its stationary value.
  Estimate radius_sq_ratio;
  bool near_zero_acceptance = false;  // accept_rate < 1e-3
  bool near_one_acceptance = false;   // accept_rate > 0.999
};

/// Random walk Metropolis on pi(x) propto exp(log_pi(|T x|)) with proposal
/// x* = x + lambda Y, Y spherical with radial law `proposal`.
ChainStats run_rwm(const RadialModel& target, const RadialModel& proposal, double lambda,
                   const ChainOptions& opts = {});

struct McExpectation {
  Estimate ear;
  Estimate esjd;
  std::size_t n_samples = 0;
};

/// Averages 2F(-lambda|Y|/2) and 2 lambda^2 |Y|^2 F(-lambda|Y|/2) over sampled |Y|.
McExpectation mc_expectation(const RadialModel& target, const RadialModel& proposal, double lambda,
                             std::size_t n_samples, std::uint64_t seed, const EngineOptions& eo = {});

}  // namespace rwm
