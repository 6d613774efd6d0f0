// rwmscale: optimal scaling of random walk Metropolis on spherically
// symmetric and elliptical targets.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rwm/asymptotics.hpp"
#include "rwm/elliptical.hpp"
#include "rwm/error.hpp"
#include "rwm/exact_engine.hpp"
#include "rwm/mcmc_validator.hpp"
#include "rwm/scaling_optimizer.hpp"
#include "rwm/spec_parsing.hpp"

namespace {

using rwm::TargetFamily;
using json = nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

std::string fmt10(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  json meta = json::object();
  bool flat = false;  // single record emitted as a bare JSON object

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, double>) {
          return fmt10(v);
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          return q + "\"";
        }
      },
      c);
}

json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return fmt10(v);
          return std::stod(fmt10(v));
        } else {
          return v;
        }
      },
      c);
}

void write_table(const Table& t, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& r : t.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_cell(r[i]);
      out << "\n";
    }
    return;
  }
  json rows = json::array();
  for (const auto& r : t.rows) {
    json o = json::object();
    for (std::size_t i = 0; i < r.size(); ++i) o[t.columns[i]] = json_cell(r[i]);
    rows.push_back(std::move(o));
  }
  json doc;
  if (t.flat && rows.size() == 1) {
    doc = rows[0];
    for (auto& [k, v] : t.meta.items()) doc[k] = v;
  } else {
    doc = t.meta;
    doc["rows"] = rows;
  }
  out << doc.dump(2) << "\n";
}

Cell opt_cell(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

struct Common {
  std::string format = "csv";
  std::string output;
  std::uint64_t seed = 1;
  std::optional<double> abs_tol;
  std::optional<double> rel_tol;
  std::optional<std::size_t> max_evals;
  bool gnuplot_hint = false;

  rwm::EngineOptions engine() const {
    rwm::EngineOptions eo;
    if (abs_tol) eo.outer_abs_tol = eo.inner_abs_tol = *abs_tol;
    if (rel_tol) eo.outer_rel_tol = eo.inner_rel_tol = *rel_tol;
    if (max_evals) eo.max_evals = *max_evals;
    return eo;
  }
};

void emit(const Table& t, const Common& c, const std::string& plot) {
  if (c.output.empty()) {
    write_table(t, c.format, std::cout);
  } else {
    std::ofstream f(c.output);
    if (!f) throw rwm::InvalidParameter("cannot write '" + c.output + "'");
    write_table(t, c.format, f);
  }
  if (c.gnuplot_hint && !plot.empty()) {
    const std::string file = c.output.empty() ? "<file>" : c.output;
    std::cerr << "gnuplot -p -e \"set datafile separator ','; " << plot << "\" # data: " << file << "\n";
  }
}


// ---- curve ----------------------------------------------------------------

struct CurveArgs {
  std::string target, proposal;
  int dim = 1;
  double lambda_min = 0.01, lambda_max = 100.0;
  std::size_t points = 200;
};

void run_curve(const CurveArgs& a, const Common& c) {
  if (!(a.lambda_min > 0.0) || !(a.lambda_max > a.lambda_min)) {
    throw rwm::InvalidParameter("curve: need 0 < lambda-min < lambda-max");
  }
  if (a.points < 2) throw rwm::InvalidParameter("curve: need at least 2 points");
  const auto tm = rwm::build_example_target(rwm::parse_target_spec(a.target), a.dim);
  const auto pm = rwm::build_example_target(rwm::parse_target_spec(a.proposal), a.dim);
  const auto grid = rwm::log_grid(a.lambda_min, a.lambda_max, a.points);
  const auto cv = rwm::curve(tm, pm, grid, c.engine());
  Table t;
  t.columns = {"lambda", "ear", "esjd", "converged"};
  for (const auto& p : cv.points) t.add({p.lambda, p.ear, p.esjd, p.converged});
  t.meta = {{"command", "curve"}, {"target", tm.label()}, {"proposal", pm.label()}, {"d", a.dim}};
  emit(t, c, "set logscale x; plot '" + (c.output.empty() ? std::string("<file>") : c.output) +
                 "' using 1:3 skip 1 with lines title 'ESJD'");
  for (const auto& p : cv.points) {
    if (!p.converged) throw rwm::QuadratureError("curve: some points failed to converge");
  }
}

// ---- optimize -------------------------------------------------------------

struct OptimizeArgs {
  std::string target, proposal;
  int dim = 1;
  double lambda_min = 1e-3, lambda_max = 1e3;
  std::size_t grid = 512;
  bool maxima = false;
};

void run_optimize(const OptimizeArgs& a, const Common& c) {
  const auto tm = rwm::build_example_target(rwm::parse_target_spec(a.target), a.dim);
  const auto pm = rwm::build_example_target(rwm::parse_target_spec(a.proposal), a.dim);
  rwm::SearchOptions so;
  so.lambda_lo = a.lambda_min;
  so.lambda_hi = a.lambda_max;
  so.grid_size = a.grid;
  so.engine = c.engine();
  const auto o = rwm::optimize(tm, pm, so);
  Table t;
  t.meta = {{"command", "optimize"}, {"target", tm.label()}, {"proposal", pm.label()}, {"d", a.dim},
            {"canonical_rule", o.canonical_rule}};
  if (a.maxima) {
    t.columns = {"d", "lambda", "ear", "esjd", "is_argmax"};
    for (std::size_t i = 0; i < o.local_maxima.size(); ++i) {
      const auto& m = o.local_maxima[i];
      t.add({static_cast<long long>(a.dim), m.lambda, m.ear, m.esjd, i == o.argmax_index});
    }
  } else {
    t.columns = {"d", "lambda_hat", "ear_hat", "esjd_hat", "n_local_maxima"};
    t.add({static_cast<long long>(a.dim), o.lambda_hat, o.ear_hat, o.esjd_hat,
           static_cast<long long>(o.local_maxima.size())});
    json maxima = json::array();
    for (const auto& m : o.local_maxima) {
      maxima.push_back({{"lambda", json_cell(m.lambda)}, {"ear", json_cell(m.ear)}, {"esjd", json_cell(m.esjd)}});
    }
    t.meta["local_maxima"] = maxima;
  }
  emit(t, c, "");
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string target, proposal, dims;
  std::size_t grid = 128;
  double decades = 2.0;
  bool drift = false;
};

void run_sweep(const SweepArgs& a, const Common& c) {
  const TargetFamily tf = rwm::parse_target_spec(a.target);
  const TargetFamily pf = rwm::parse_target_spec(a.proposal);
  const auto dims = rwm::parse_dims(a.dims);
  rwm::SweepOptions so;
  so.grid_size = a.grid;
  so.decades = a.decades;
  so.search.engine = c.engine();
  const auto sw = rwm::sweep_dimension(tf, pf, dims, so);
  Table t;
  t.meta = {{"command", a.drift ? "sweep-drift" : "sweep"}, {"target", sw.target}, {"proposal", sw.proposal}};
  if (sw.asymptote) {
    t.meta["asymptote"] = {{"mu_hat", json_cell(sw.asymptote->mu_hat)}, {"aoa", json_cell(sw.asymptote->aoa)}};
  }
  if (a.drift) {
    const auto rep = rwm::peak_drift_diagnostic(sw);
    t.columns = {"d", "mu_hat", "n_local_maxima", "mu_maxima", "global_on_left", "classification"};
    for (const auto& r : rep.rows) {
      std::string mus;
      for (std::size_t i = 0; i < r.mu_maxima.size(); ++i) mus += (i ? ";" : "") + fmt10(r.mu_maxima[i]);
      t.add({static_cast<long long>(r.d), r.mu_hat, static_cast<long long>(r.mu_maxima.size()), mus,
             r.global_on_left, std::string(rwm::to_string(rep.classification))});
    }
    t.meta["classification"] = rwm::to_string(rep.classification);
    emit(t, c, "set logscale xy; plot '" + (c.output.empty() ? std::string("<file>") : c.output) +
                   "' using 1:2 skip 1 with linespoints");
  } else {
    t.columns = {"d", "lambda_hat", "ear_hat", "esjd_hat", "n_local_maxima", "corollary4_lambda", "status"};
    for (const auto& r : sw.rows) {
      if (r.optimum) {
        t.add({static_cast<long long>(r.d), r.optimum->lambda_hat, r.optimum->ear_hat, r.optimum->esjd_hat,
               static_cast<long long>(r.optimum->local_maxima.size()), opt_cell(r.predicted_lambda), r.status});
      } else {
        t.add({static_cast<long long>(r.d), Cell{}, Cell{}, Cell{}, Cell{}, opt_cell(r.predicted_lambda), r.status});
      }
    }
    emit(t, c, "set logscale x; plot '" + (c.output.empty() ? std::string("<file>") : c.output) +
                   "' using 1:3 skip 1 with linespoints title 'optimal EAR'");
  }
  for (const auto& r : sw.rows) {
    if (!r.optimum) throw rwm::QuadratureError("sweep: d = " + std::to_string(r.d) + " failed: " + r.status);
  }
}

// ---- asymptotic -----------------------------------------------------------

struct AsymptoticArgs {
  std::string mixing = "point:1";
  std::vector<double> mu;
  double mu_max = 1e6;
  std::optional<int> dim;
  std::optional<double> k_x, k_y;
  std::size_t samples = 100000;
};

void run_asymptotic(const AsymptoticArgs& a, const Common& c) {
  const auto R = rwm::parse_mixing_spec(a.mixing, c.seed, a.samples);
  Table t;
  t.meta = {{"command", "asymptotic"}, {"mixing", R.label()}};
  if (!a.mu.empty()) {
    t.columns = {"mu", "theta_minus", "limit_ear", "limit_esjd", "g"};
    for (double mu : a.mu) {
      if (!(mu >= 0.0)) throw rwm::DomainError("asymptotic: mu must be >= 0");
      const double th = rwm::theta(R, -mu);
      t.add({mu, th, 2.0 * th, 2.0 * mu * mu * th, rwm::optimality_residual(R, mu)});
    }
    emit(t, c, "plot '" + (c.output.empty() ? std::string("<file>") : c.output) + "' using 1:4 skip 1 with lines");
    return;
  }
  rwm::AotsOptions ao;
  ao.mu_max = a.mu_max;
  const auto opt = rwm::solve_aots(R, ao);
  t.columns = {"finite", "mu_hat", "aoa", "limit_esjd", "residual", "n_roots", "monotone_certificate", "aos_lambda"};
  Cell aos_cell;
  if (opt.finite && a.dim && a.k_x && a.k_y) aos_cell = rwm::aos(opt.mu_hat, *a.k_x, *a.k_y, *a.dim);
  if (opt.finite) {
    t.add({true, opt.mu_hat, opt.aoa, opt.limit_esjd_at_mu_hat, opt.residual,
           static_cast<long long>(opt.roots.size()), opt.monotone_certificate, aos_cell});
  } else {
    t.add({false, Cell{}, 0.0, Cell{}, Cell{}, static_cast<long long>(opt.roots.size()), opt.monotone_certificate,
           Cell{}});
  }
  t.flat = true;
  emit(t, c, "");
}

// ---- elliptical -----------------------------------------------------------

struct EllipticalArgs {
  std::string eigen = "iota";
  std::string core = "gaussian";
  std::string proposal = "gaussian";
  std::string dims = "10,20,50";
  std::optional<double> lambda;
  bool optimize = false;
  std::size_t directions = 200000;
  std::size_t msd_samples = 100000;
};

void run_elliptical(const EllipticalArgs& a, const Common& c) {
  const auto rule = rwm::parse_eigen_rule(a.eigen);
  const TargetFamily core = rwm::parse_target_spec(a.core);
  const TargetFamily prop = rwm::parse_target_spec(a.proposal);
  const auto dims = rwm::parse_dims(a.dims);
  const auto ecc = rwm::eccentricity_condition(rule, dims);
  const auto l5 = rwm::lemma5_numeric_check(rule, dims, a.msd_samples, c.seed);
  std::optional<double> mu_hat;
  if (const auto R = rwm::limiting_mixing(core)) {
    const auto o = rwm::solve_aots(*R);
    if (o.finite) mu_hat = o.mu_hat;
  }
  rwm::EllipticalOptions eo;
  eo.directions = a.directions;
  eo.seed = c.seed;
  eo.engine = c.engine();

  Table t;
  t.columns = {"d", "eccentricity_ratio", "nu_bar", "aos_lambda", "msd", "msd_se"};
  if (a.lambda) t.columns.insert(t.columns.end(), {"lambda", "ear", "ear_se", "esjd", "esjd_se"});
  if (a.optimize) t.columns.insert(t.columns.end(), {"opt_lambda", "opt_ear", "opt_esjd"});
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const int d = dims[i];
    const rwm::EllipticalSpec spec(rule.eigenvalues(d), rwm::build_example_target(core, d),
                                   rwm::build_example_target(prop, d));
    const auto kx = core.scale_constant(d);
    const auto ky = prop.scale_constant(d);
    Cell aos_cell;
    double lam_ref = 1.0;
    if (mu_hat && kx && ky) {
      const auto e = rwm::elliptical_aos(spec, *mu_hat, *kx, *ky, &ecc);
      aos_cell = e.lambda_hat;
      lam_ref = e.lambda_hat;
    }
    std::vector<Cell> row{static_cast<long long>(d), ecc.rows[i].ratio, std::sqrt(spec.mean_square()), aos_cell,
                          l5.rows[i].msd, l5.rows[i].se};
    if (a.lambda) {
      const auto v = rwm::elliptical_ear_esjd(spec, *a.lambda, eo);
      row.insert(row.end(), {*a.lambda, v.ear, v.ear_se, v.esjd, v.esjd_se});
    }
    if (a.optimize) {
      rwm::SearchOptions so;
      so.lambda_lo = lam_ref / 1e3;
      so.lambda_hi = lam_ref * 1e3;
      so.grid_size = 256;
      const auto o = rwm::elliptical_optimize(spec, so, eo);
      row.insert(row.end(), {o.lambda_hat, o.ear_hat, o.esjd_hat});
    }
    t.add(std::move(row));
  }
  t.meta = {{"command", "elliptical"},
            {"eigenvalues", rule.name()},
            {"core", core.name()},
            {"proposal", prop.name()},
            {"eccentricity", ecc.satisfied ? "satisfied" : "violated"},
            {"eccentricity_slope", json_cell(ecc.slope)},
            {"stretch_deviation", l5.decreasing ? "decreasing" : "stalled"},
            {"msd_slope", json_cell(l5.slope)}};
  if (!ecc.satisfied) std::cerr << "warning: eccentricity condition violated; AOS is not justified\n";
  emit(t, c, "");
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string target, proposal;
  int dim = 1;
  double lambda = 1.0;
  std::size_t iters = 1'000'000;
  std::size_t burn_in = 0;
  std::optional<std::string> eigen;
};

void run_simulate(const SimulateArgs& a, const Common& c) {
  const auto tm = rwm::build_example_target(rwm::parse_target_spec(a.target), a.dim);
  const auto pm = rwm::build_example_target(rwm::parse_target_spec(a.proposal), a.dim);
  rwm::ChainOptions co;
  co.n_iters = a.iters;
  co.burn_in = a.burn_in;
  co.seed = c.seed;
  if (a.eigen) co.eigenvalues = rwm::parse_eigen_rule(*a.eigen).eigenvalues(a.dim);
  const auto s = rwm::run_rwm(tm, pm, a.lambda, co);
  Table t;
  t.flat = true;
  t.columns = {"target", "proposal", "d", "lambda", "n_iters", "burn_in", "seed", "accept_rate", "accept_se",
               "esjd", "esjd_se", "near_zero_acceptance", "near_one_acceptance"};
  t.add({tm.label(), pm.label(), static_cast<long long>(a.dim), a.lambda, static_cast<long long>(s.n_iters),
         static_cast<long long>(s.burn_in), static_cast<long long>(s.seed), s.accept_rate.value, s.accept_rate.error,
         s.esjd.value, s.esjd.error, s.near_zero_acceptance, s.near_one_acceptance});
  if (s.near_zero_acceptance) std::cerr << "warning: acceptance rate near 0\n";
  if (s.near_one_acceptance) std::cerr << "warning: acceptance rate near 1\n";
  emit(t, c, "");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal scaling of random walk Metropolis: exact EAR/ESJD, optima, limits, simulation"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-o,--output", common.output, "Output file (default stdout)");
  app.add_option("--seed", common.seed, "Random seed");
  app.add_option("--abs-tol", common.abs_tol, "Quadrature absolute tolerance")->check(CLI::PositiveNumber);
  app.add_option("--rel-tol", common.rel_tol, "Quadrature relative tolerance")->check(CLI::PositiveNumber);
  app.add_option("--max-evals", common.max_evals, "Quadrature evaluation budget")->check(CLI::PositiveNumber);
  app.add_flag("--gnuplot-hint", common.gnuplot_hint, "Print a gnuplot one-liner on stderr");

  CurveArgs ca;
  auto* curve = app.add_subcommand("curve", "EAR and ESJD over a log-spaced lambda grid");
  curve->add_option("target", ca.target)->required();
  curve->add_option("proposal", ca.proposal)->required();
  curve->add_option("--dim", ca.dim)->check(CLI::PositiveNumber);
  curve->add_option("--lambda-min", ca.lambda_min);
  curve->add_option("--lambda-max", ca.lambda_max);
  curve->add_option("--points", ca.points);

  OptimizeArgs oa;
  auto* opt = app.add_subcommand("optimize", "ESJD-optimal scaling and all local maxima");
  opt->add_option("target", oa.target)->required();
  opt->add_option("proposal", oa.proposal)->required();
  opt->add_option("--dim", oa.dim)->check(CLI::PositiveNumber);
  opt->add_option("--lambda-min", oa.lambda_min);
  opt->add_option("--lambda-max", oa.lambda_max);
  opt->add_option("--grid", oa.grid);
  opt->add_flag("--maxima", oa.maxima, "One row per local maximum");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Optimal scaling against dimension");
  sweep->add_option("target", sa.target)->required();
  sweep->add_option("proposal", sa.proposal)->required();
  sweep->add_option("--dims", sa.dims, "e.g. 1,2,5 or 1:100:log10")->required();
  sweep->add_option("--grid", sa.grid);
  sweep->add_option("--decades", sa.decades)->check(CLI::PositiveNumber);
  sweep->add_flag("--drift", sa.drift, "Peak-drift diagnostic in transformed scale");

  AsymptoticArgs aa;
  auto* asym = app.add_subcommand("asymptotic", "Limiting optimal transformed scaling and acceptance rate");
  asym->add_option("--mixing", aa.mixing, "point:c | halfnormal | exp | lognormal | atoms:.. | samples:.. | from-target:..");
  asym->add_option("--mu", aa.mu, "Tabulate limits at these mu instead of solving");
  asym->add_option("--mu-max", aa.mu_max)->check(CLI::PositiveNumber);
  asym->add_option("--dim", aa.dim)->check(CLI::PositiveNumber);
  asym->add_option("--k-x", aa.k_x)->check(CLI::PositiveNumber);
  asym->add_option("--k-y", aa.k_y)->check(CLI::PositiveNumber);
  asym->add_option("--samples", aa.samples, "Draws for from-target mixing laws");

  EllipticalArgs ea;
  auto* ell = app.add_subcommand("elliptical", "Eccentricity condition, elliptical AOS and stretch deviation check");
  ell->add_option("--eigen", ea.eigen, "const:c | iota | spike:c | spike:d | file:path");
  ell->add_option("--core", ea.core);
  ell->add_option("--proposal", ea.proposal);
  ell->add_option("--dims", ea.dims);
  ell->add_option("--lambda", ea.lambda)->check(CLI::PositiveNumber);
  ell->add_flag("--optimize", ea.optimize, "Finite-d optimum of the Mahalanobis ESJD");
  ell->add_option("--directions", ea.directions);
  ell->add_option("--msd-samples", ea.msd_samples);

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "Run a random walk Metropolis chain");
  sim->add_option("target", ma.target)->required();
  sim->add_option("proposal", ma.proposal)->required();
  sim->add_option("--dim", ma.dim)->check(CLI::PositiveNumber);
  sim->add_option("--lambda", ma.lambda)->required();
  sim->add_option("--iters", ma.iters);
  sim->add_option("--burn-in", ma.burn_in);
  sim->add_option("--eigen", ma.eigen, "Elliptical target with these eigenvalues");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*curve) run_curve(ca, common);
    if (*opt) run_optimize(oa, common);
    if (*sweep) run_sweep(sa, common);
    if (*asym) run_asymptotic(aa, common);
    if (*ell) run_elliptical(ea, common);
    if (*sim) run_simulate(ma, common);
  } catch (const rwm::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
