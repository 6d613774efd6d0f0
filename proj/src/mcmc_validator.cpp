#include "rwm/mcmc_validator.hpp"

#include <cmath>
#include <random>

#include "rwm/error.hpp"
#include "rwm/parallel.hpp"

namespace rwm {

namespace {

void uniform_direction(std::mt19937_64& rng, std::normal_distribution<double>& z, std::vector<double>& u) {
  double s = 0.0;
  do {
    s = 0.0;
    for (auto& x : u) {
      x = z(rng);
      s += x * x;
    }
  } while (s == 0.0);
  const double inv = 1.0 / std::sqrt(s);
  for (auto& x : u) x *= inv;
}

Estimate batch_mean(const std::vector<double>& batch_sums, std::size_t per_batch, std::size_t total) {
  double sum = 0.0;
  for (double b : batch_sums) sum += b;
  const double mean = sum / static_cast<double>(total);
  const std::size_t k = batch_sums.size();
  double var = 0.0;
  for (double b : batch_sums) {
    const double m = b / static_cast<double>(per_batch);
    var += (m - mean) * (m - mean);
  }
  var /= static_cast<double>(k - 1);
  return {mean, std::sqrt(var / static_cast<double>(k))};
}

}  // namespace

ChainStats run_rwm(const RadialModel& target, const RadialModel& proposal, double lambda, const ChainOptions& opts) {
  const int d = target.dimension();
  if (proposal.dimension() != d) throw InvalidParameter("run_rwm: target and proposal dimensions differ");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("run_rwm: lambda must be > 0");
  if (opts.n_iters < 10000) throw InvalidParameter("run_rwm: need at least 1e4 iterations");
  if (opts.batches < 2) throw InvalidParameter("run_rwm: need at least 2 batches");
  const std::size_t burn = opts.burn_in == 0 ? opts.n_iters / 10 : opts.burn_in;
  if (burn >= opts.n_iters) throw InvalidParameter("run_rwm: burn-in must be below n_iters");
  std::vector<double> nu = opts.eigenvalues;
  if (nu.empty()) nu.assign(d, 1.0);
  if (static_cast<int>(nu.size()) != d) throw InvalidParameter("run_rwm: eigenvalue count must equal d");
  for (double v : nu) {
    if (!(v > 0.0)) throw InvalidParameter("run_rwm: eigenvalues must be > 0");
  }

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Work in transformed coordinates x_* = T x; the proposal there is lambda T Y.
  std::vector<double> x(d), u(d), prop(d);
  uniform_direction(rng, z, u);
  const double r0 = target.sample_one(rng);
  double sq = 0.0;
  for (int i = 0; i < d; ++i) {
    x[i] = r0 * u[i];
    sq += x[i] * x[i];
  }
  double log_pi = target.log_pi(std::sqrt(sq));
  const double stationary_sq = target.moment(2.0);

  const std::size_t kept = opts.n_iters - burn;
  const std::size_t per_batch = kept / opts.batches;
  const std::size_t used = per_batch * opts.batches;
  std::vector<double> acc_b(opts.batches, 0.0), jump_b(opts.batches, 0.0), rad_b(opts.batches, 0.0);

  for (std::size_t it = 0; it < burn + used; ++it) {
    uniform_direction(rng, z, u);
    const double ry = lambda * proposal.sample_one(rng);
    double psq = 0.0, jump = 0.0;
    for (int i = 0; i < d; ++i) {
      const double step = ry * nu[i] * u[i];
      prop[i] = x[i] + step;
      psq += prop[i] * prop[i];
      jump += step * step;
    }
    const double lp = target.log_pi(std::sqrt(psq));
    const double diff = lp - log_pi;
    const bool accept = diff >= 0.0 || unif(rng) < std::exp(diff);
    if (accept) {
      x.swap(prop);
      log_pi = lp;
      sq = psq;
    }
    if (it >= burn) {
      const std::size_t b = (it - burn) / per_batch;
      if (accept) {
        acc_b[b] += 1.0;
        jump_b[b] += jump;
      }
      rad_b[b] += sq;
    }
  }

  ChainStats out;
  out.n_iters = opts.n_iters;
  out.burn_in = burn;
  out.seed = opts.seed;
  out.accept_rate = batch_mean(acc_b, per_batch, used);
  out.esjd = batch_mean(jump_b, per_batch, used);
  out.radius_sq_ratio = batch_mean(rad_b, per_batch, used);
  out.radius_sq_ratio.value /= stationary_sq;
  out.radius_sq_ratio.error /= stationary_sq;
  out.near_zero_acceptance = out.accept_rate.value < 1e-3;
  out.near_one_acceptance = out.accept_rate.value > 0.999;
  return out;
}

McExpectation mc_expectation(const RadialModel& target, const RadialModel& proposal, double lambda,
                             std::size_t n_samples, std::uint64_t seed, const EngineOptions& eo) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("mc_expectation: lambda must be > 0");
  if (n_samples < 10000) throw InvalidParameter("mc_expectation: need at least 1e4 samples");
  if (proposal.dimension() != target.dimension()) {
    throw InvalidParameter("mc_expectation: target and proposal dimensions differ");
  }
  const auto radii = proposal.sample(n_samples, seed);
  std::vector<double> a(n_samples), s(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    const double y = radii[i];
    const double f = marginal_cdf(target, -0.5 * lambda * y, eo);
    a[i] = 2.0 * f;
    s[i] = 2.0 * lambda * lambda * y * y * f;
  });
  auto summarize = [n_samples](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(n_samples);
    double q = 0.0;
    for (double x : v) q += (x - m) * (x - m);
    q /= static_cast<double>(n_samples - 1);
    return Estimate{m, std::sqrt(q / static_cast<double>(n_samples))};
  };
  return {summarize(a), summarize(s), n_samples};
}

}  // namespace rwm
