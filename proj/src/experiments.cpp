#include "mfg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>
#include "json.hpp"

#include "mfg/diagnostics.hpp"
#include "mfg/error.hpp"
#include "mfg/io.hpp"
#include "mfg/regularity.hpp"

namespace mfg {

namespace {

struct ColumnInfo {
  const char* unit;
  const char* meaning;
};

const std::map<std::string, ColumnInfo>& column_info() {
  static const std::map<std::string, ColumnInfo> info{
      {"x", {"length", "node coordinate, axis 0"}},
      {"y", {"length", "node coordinate, axis 1"}},
      {"m", {"mass/length^n", "density"}},
      {"u", {"cost", "value function, min u = 0"}},
      {"w_x", {"mass/length^(n-1)/time", "flux, axis 0"}},
      {"w_y", {"mass/length^(n-1)/time", "flux, axis 1"}},
      {"V", {"cost", "potential"}},
      {"v2", {"mass/length^n", "squared NLS profile"}},
      {"mass", {"mass", "total mass M"}},
      {"mass_frac", {"1", "M / M*"}},
      {"lambda", {"cost", "ergodic constant"}},
      {"lambda_scaled", {"1", "lambda eps^r / (-r/(n M*)), tends to 1 as M -> M*"}},
      {"energy", {"energy", "total energy of (m, w)"}},
      {"kinetic", {"energy", "int C_L |w/m|^r m"}},
      {"epsilon", {"length", "blow-up scale kinetic^(-1/r)"}},
      {"gamma", {"1", "GN ratio at the critical exponent"}},
      {"m_star", {"mass", "critical mass [(1+r/n) gamma]^(n/r)"}},
      {"coupling", {"energy", "int m^(alpha+1)"}},
      {"fp_constant", {"1", "int m^(1+alpha) over M^a (kinetic/C_L)^b"}},
      {"x_eps", {"length", "argmin u, axis 0"}},
      {"y_eps", {"length", "argmin u, axis 1"}},
      {"x_bar", {"length", "argmax m, axis 0"}},
      {"y_bar", {"length", "argmax m, axis 1"}},
      {"pohozaev_res1", {"1", "relative residual of the lambda identity"}},
      {"pohozaev_res2", {"1", "relative residual of the kinetic identity"}},
      {"pohozaev_res3", {"1", "relative residual of the Hamiltonian-Lagrangian balance"}},
      {"iterations", {"count", "fixed-point iterations"}},
      {"residual", {"1", "HJB residual + fixed-point defect + mass error"}},
      {"converged", {"bool", "1 when all tolerances were met"}},
      {"branch", {"index", "multistart branch that gave the lowest energy"}},
      {"identity_rhs", {"1", "n/(n+r) (M*)^(r/n)"}},
      {"identity_defect", {"1", "|gamma - identity_rhs|"}},
      {"ground_mass", {"mass", "mass of the computed potential-free ground state"}},
      {"eps_ratio", {"1", "epsilon over the predicted blow-up law"}},
      {"energy_ratio", {"1", "energy over the predicted energy law"}},
      {"delta", {"1", "1 - (M/M*)^(r/n)"}},
      {"quantity", {"label", "fitted quantity"}},
      {"fitted", {"1", "least-squares value"}},
      {"predicted", {"1", "asymptotic prediction"}},
      {"relative_error", {"1", "|fitted - predicted| / |predicted|"}},
      {"r2", {"1", "coefficient of determination"}},
      {"well", {"index", "well number"}},
      {"center_x", {"length", "well center, axis 0"}},
      {"center_y", {"length", "well center, axis 1"}},
      {"a", {"cost", "well amplitude"}},
      {"q", {"1", "local exponent"}},
      {"y_x", {"length", "minimizer of the weighted moment, axis 0"}},
      {"y_y", {"length", "minimizer of the weighted moment, axis 1"}},
      {"mu", {"1", "weighted moment min_y int a |x+y|^q m0"}},
      {"flattest", {"bool", "q equals the largest exponent"}},
      {"in_z0", {"bool", "well minimizes mu among the flattest"}},
      {"nearest_well", {"index", "well closest to x_eps"}},
      {"distance", {"length", "|x_eps - nearest center|"}},
      {"dist_over_eps", {"1", "distance / epsilon"}},
      {"sample", {"index", "family member"}},
      {"grid_n", {"count", "nodes per axis"}},
      {"weighted_sup", {"1", "weighted Morrey sup-statistic"}},
      {"harnack_sup", {"1", "sup over radii of the Harnack constant K(R)"}},
      {"statistic", {"label", "probe statistic"}},
      {"coarse_max", {"1", "family maximum on the coarse grid"}},
      {"fine_max", {"1", "family maximum on the fine grid"}},
      {"growth", {"1", "fine_max / coarse_max"}},
      {"coarse_max_over_median", {"1", "family max / median, coarse grid"}},
      {"fine_max_over_median", {"1", "family max / median, fine grid"}},
      {"mass_mfg", {"mass", "MFG ground-state mass"}},
      {"mass_nls", {"mass", "NLS profile mass"}},
      {"lambda_mfg", {"cost", "MFG ergodic constant"}},
      {"lambda_nls", {"cost", "NLS eigenvalue (Rayleigh quotient)"}},
      {"lambda_rel_diff", {"1", "|lambda_mfg - lambda_nls| / |lambda_mfg|"}},
      {"l1_rel", {"1", "||m - v^2||_1 / M after centroid alignment"}},
      {"fixed_lambda", {"bool", "NLS run at fixed lambda with mass as output"}},
  };
  return info;
}

std::string f(double x) { return format_number(x); }

Artifact csv(const std::string& name, const CsvTable& t) { return {name, t.str()}; }

ProblemSpec critical_free(const ProblemSpec& spec) {
  ProblemSpec s = spec;
  s.potential = PotentialSpec::zero();
  s.alpha_critical = true;
  return s;
}

GammaResult critical_mass(const RunConfig& cfg) { return gamma_and_mstar(critical_free(cfg.problem), cfg.seed_mass); }

CsvTable field_table(const MfgSolution& sol, const ScalarField& V) {
  const Grid& g = sol.grid();
  CsvTable t;
  t.columns = g.dim == 1 ? std::vector<std::string>{"x", "m", "u", "w_x", "V"}
                         : std::vector<std::string>{"x", "y", "m", "u", "w_x", "w_y", "V"};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    if (g.dim == 1)
      t.add({x[0], sol.pair.m()[i], sol.u.u[i], sol.pair.w().component(0)[i], V[i]});
    else
      t.add({x[0], x[1], sol.pair.m()[i], sol.u.u[i], sol.pair.w().component(0)[i], sol.pair.w().component(1)[i],
             V[i]});
  }
  return t;
}

CsvTable report_table(const MfgSolution& sol, const DiagnosticsReport& r) {
  const bool two = sol.grid().dim == 2;
  CsvTable t;
  t.columns = {"mass", "lambda", "energy", "kinetic", "epsilon", "gamma", "m_star", "coupling", "fp_constant", "x_eps"};
  if (two) t.columns.push_back("y_eps");
  t.columns.push_back("x_bar");
  if (two) t.columns.push_back("y_bar");
  for (const char* c : {"pohozaev_res1", "pohozaev_res2", "pohozaev_res3", "iterations", "residual", "converged"})
    t.columns.push_back(c);
  std::vector<double> row{r.mass,  r.lambda,   r.energy,   r.kinetic,     r.epsilon,
                          r.gamma, r.m_star,   r.coupling, r.fp_constant, r.x_eps[0]};
  if (two) row.push_back(r.x_eps[1]);
  row.push_back(r.x_bar[0]);
  if (two) row.push_back(r.x_bar[1]);
  for (double v : {r.pohozaev_res1, r.pohozaev_res2, r.pohozaev_res3, double(sol.iterations), sol.residual,
                   sol.converged ? 1.0 : 0.0})
    row.push_back(v);
  t.add(row);
  return t;
}

double lambda_scaled(const DiagnosticsReport& r, int n, double rr, double m_star) {
  return r.lambda * std::pow(r.epsilon, rr) / (-rr / (n * m_star));
}

CsvTable sweep_table(const SweepResult& sw, int n, double rr, double m_star) {
  CsvTable t;
  t.columns = {"mass_frac", "mass", "epsilon", "energy", "lambda", "lambda_scaled", "kinetic", "x_eps"};
  if (n == 2) t.columns.push_back("y_eps");
  for (const char* c : {"branch", "iterations", "residual"}) t.columns.push_back(c);
  for (const auto& e : sw.entries) {
    const auto& r = e.report;
    std::vector<double> row{r.mass / m_star, r.mass,   r.epsilon, r.energy, r.lambda, lambda_scaled(r, n, rr, m_star),
                            r.kinetic,       r.x_eps[0]};
    if (n == 2) row.push_back(r.x_eps[1]);
    row.push_back(double(e.branch));
    row.push_back(double(e.solution.iterations));
    row.push_back(e.solution.residual);
    t.add(row);
  }
  return t;
}

std::vector<double> sweep_masses(const RunConfig& cfg, double m_star) {
  if (!cfg.masses.empty()) return cfg.masses;
  std::vector<double> m;
  for (double fr : cfg.fractions) m.push_back(fr * m_star);
  return m;
}

SweepOptions sweep_options(const RunConfig& cfg) {
  SweepOptions so;
  so.multistart = cfg.multistart.value_or(cfg.problem.potential.kind == PotentialKind::Multiwell);
  if (cfg.init_path) so.init = load_solution(*cfg.init_path, cfg.problem.grid()).pair;
  return so;
}

void add_plot(RunOutput& out, const RunConfig& cfg, const std::string& name, std::string svg) {
  if (cfg.plots) out.files.push_back({name, std::move(svg)});
}

void note_abort(RunOutput& out, const SweepResult& sw) {
  out.metrics["aborted"] = sw.aborted ? 1.0 : 0.0;
  if (sw.aborted)
    out.summary += fmt::format("sweep stopped at mass index {}: {}\n", sw.abort_index, sw.abort_reason);
}

}  // namespace

RunOutput run_gamma(const RunConfig& cfg) {
  if (!cfg.problem.alpha_critical) throw ConfigError("gamma needs alpha = critical");
  const auto res = critical_mass(cfg);
  const int n = cfg.problem.dim;
  const double r = cfg.problem.ham.r();
  const auto rep = make_report(res.ground);
  RunOutput out;
  out.subcommand = "gamma";
  CsvTable t;
  t.columns = {"gamma", "m_star", "identity_rhs", "identity_defect", "ground_mass", "lambda", "epsilon",
               "pohozaev_res1", "pohozaev_res2", "pohozaev_res3", "iterations"};
  const double rhs = gamma_from_mstar(res.m_star, n, r);
  t.add({res.gamma, res.m_star, rhs, res.identity_defect, res.ground_mass, res.ground.lambda, rep.epsilon,
         rep.pohozaev_res1, rep.pohozaev_res2, rep.pohozaev_res3, double(res.ground.iterations)});
  out.files.push_back(csv("gamma.csv", t));
  out.files.push_back(csv("ground.csv", field_table(res.ground, ScalarField::constant(res.ground.grid(), 0.0))));
  out.files.push_back({"ground.bin", serialize_solution(res.ground)});
  if (n == 1) {
    const Grid& g = res.ground.grid();
    SvgSeries s{"m", {}, res.ground.pair.m().values()};
    for (std::size_t i = 0; i < g.size(); ++i) s.x.push_back(g.coord(i));
    add_plot(out, cfg, "ground.svg", svg_plot("potential-free ground state", "x", "m", {s}));
  }
  out.summary = fmt::format("Gamma = {:.10g}\nM* = {:.10g}\n", res.gamma, res.m_star);
  out.summary += fmt::format("identity: Gamma = n/(n+r) (M*)^(r/n): {:.10g} = {:.10g} (defect {:.3e})\n", res.gamma,
                             rhs, res.identity_defect);
  out.summary += fmt::format("Pohozaev residuals: {:.3e} {:.3e}\n", rep.pohozaev_res1, rep.pohozaev_res2);
  out.metrics = {{"gamma", res.gamma},
                 {"m_star", res.m_star},
                 {"identity_defect", res.identity_defect},
                 {"ground_mass", res.ground_mass},
                 {"pohozaev_res1", rep.pohozaev_res1},
                 {"pohozaev_res2", rep.pohozaev_res2}};
  return out;
}

RunOutput run_solve(const RunConfig& cfg) {
  const ProblemSpec& spec = cfg.problem;
  std::optional<FlowPair> init;
  if (cfg.init_path) init = load_solution(*cfg.init_path, spec.grid()).pair;
  const bool free = spec.potential.is_zero();
  MfgSolution sol = free ? potential_free_ground(spec, spec.mass) : solve_mfg(spec, spec.mass, init);
  const auto rep = make_report(sol);
  const ScalarField V = potential_field(spec.potential, spec.grid());
  RunOutput out;
  out.subcommand = "solve";
  out.files.push_back(csv("solution.csv", field_table(sol, V)));
  out.files.push_back(csv("report.csv", report_table(sol, rep)));
  out.files.push_back({"solution.bin", serialize_solution(sol)});
  if (spec.dim == 1) {
    const Grid& g = sol.grid();
    std::vector<double> x(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) x[i] = g.coord(i);
    add_plot(out, cfg, "solution.svg",
             svg_plot("stationary solution", "x", "m", {SvgSeries{"m", x, sol.pair.m().values()}}));
  }
  out.summary = fmt::format("mass = {:.10g}\nlambda = {:.10g}\nenergy = {:.10g}\nepsilon = {:.10g}\niterations = {}\n",
                            rep.mass, rep.lambda, rep.energy, rep.epsilon, sol.iterations);
  out.metrics = {{"mass", rep.mass}, {"lambda", rep.lambda}, {"energy", rep.energy}, {"epsilon", rep.epsilon}};
  return out;
}

RunOutput run_sweep(const RunConfig& cfg) {
  const auto gm = critical_mass(cfg);
  const auto masses = sweep_masses(cfg, gm.m_star);
  const auto sw = continuation_sweep(cfg.problem, masses, sweep_options(cfg));
  RunOutput out;
  out.subcommand = "sweep";
  const int n = cfg.problem.dim;
  const double r = cfg.problem.ham.r();
  const CsvTable t = sweep_table(sw, n, r, gm.m_star);
  out.files.push_back(csv("sweep.csv", t));
  SvgSeries s{"epsilon", {}, {}, true};
  for (const auto& e : sw.entries) {
    s.x.push_back(e.report.mass / gm.m_star);
    s.y.push_back(e.report.epsilon);
  }
  add_plot(out, cfg, "sweep.svg", svg_plot("blow-up scale", "M/M*", "epsilon", {s}));
  out.summary = fmt::format("M* = {:.10g}\n{} of {} masses solved\n", gm.m_star, sw.entries.size(), masses.size());
  note_abort(out, sw);
  out.metrics["m_star"] = gm.m_star;
  out.metrics["solved"] = double(sw.entries.size());
  return out;
}

RunOutput run_blowup(const RunConfig& cfg) {
  const ProblemSpec& spec = cfg.problem;
  if (!spec.alpha_critical) throw ConfigError("blowup needs alpha = critical");
  if (spec.potential.kind != PotentialKind::Polynomial && spec.potential.kind != PotentialKind::Multiwell)
    throw ConfigError("blowup needs a polynomial or multiwell potential");
  const int n = spec.dim;
  const double r = spec.ham.r();
  const auto gm = critical_mass(cfg);
  const auto profile = rescaled_profile(gm.ground, spec.ham);
  const MuTable mu = mu_weights(spec.potential, profile.m);
  const auto masses = sweep_masses(cfg, gm.m_star);
  const auto sw = continuation_sweep(spec, masses, sweep_options(cfg));
  std::vector<DiagnosticsReport> reps;
  for (const auto& e : sw.entries) reps.push_back(e.report);
  const FitResult fit = blowup_fit(reps, mu.q_max, mu.mu, gm.m_star, n, r, cfg.fit_lo, cfg.fit_hi);
  const auto conc = concentration_check(reps, spec.potential, mu, gm.m_star);

  RunOutput out;
  out.subcommand = "blowup";
  out.files.push_back(csv("sweep.csv", sweep_table(sw, n, r, gm.m_star)));

  CsvTable ft;
  ft.columns = {"mass_frac", "epsilon", "energy", "eps_ratio", "energy_ratio"};
  for (std::size_t i = 0; i < fit.points; ++i)
    ft.add({fit.mass_frac[i], fit.epsilon[i], fit.energy_values[i], fit.eps_ratio[i], fit.energy_ratio[i]});
  out.files.push_back(csv("fit.csv", ft));

  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  CsvTable fs;
  fs.columns = {"quantity", "fitted", "predicted", "relative_error", "r2"};
  fs.add_cells({"eps_slope", f(fit.eps.slope), f(fit.eps_slope_pred), f(rel(fit.eps.slope, fit.eps_slope_pred)),
                f(fit.eps.r2)});
  fs.add_cells({"eps_prefactor", f(fit.eps.prefactor()), f(fit.eps_prefactor_pred),
                f(rel(fit.eps.prefactor(), fit.eps_prefactor_pred)), f(fit.eps.r2)});
  fs.add_cells({"energy_slope", f(fit.energy.slope), f(fit.energy_slope_pred),
                f(rel(fit.energy.slope, fit.energy_slope_pred)), f(fit.energy.r2)});
  fs.add_cells({"energy_prefactor", f(fit.energy.prefactor()), f(fit.energy_prefactor_pred),
                f(rel(fit.energy.prefactor(), fit.energy_prefactor_pred)), f(fit.energy.r2)});
  fs.add_cells({"m_star_extrapolated", f(fit.m_star_extrapolated), f(gm.m_star),
                f(rel(fit.m_star_extrapolated, gm.m_star)), "nan"});
  out.files.push_back(csv("fit_summary.csv", fs));

  CsvTable mt;
  mt.columns = {"well", "center_x", "center_y", "a", "q", "y_x", "y_y", "mu", "flattest", "in_z0"};
  for (std::size_t i = 0; i < mu.wells.size(); ++i) {
    const auto& w = mu.wells[i];
    mt.add({double(i), w.center[0], w.center[1], w.a, w.q, w.y[0], w.y[1], w.mu, w.flattest ? 1.0 : 0.0,
            w.in_z0 ? 1.0 : 0.0});
  }
  out.files.push_back(csv("mu_table.csv", mt));

  CsvTable ct;
  ct.columns = {"mass_frac", "nearest_well", "distance", "dist_over_eps", "in_z0"};
  for (const auto& p : conc.points)
    ct.add({p.mass_frac, double(p.nearest), p.distance, p.dist_over_eps, p.in_z0 ? 1.0 : 0.0});
  out.files.push_back(csv("concentration.csv", ct));

  SvgSeries se{"epsilon", fit.delta, fit.epsilon, true}, sp{"predicted", fit.delta, {}};
  SvgSeries ee{"energy", fit.delta, fit.energy_values, true}, ep{"predicted", fit.delta, {}};
  for (double d : fit.delta) {
    sp.y.push_back(fit.eps_prefactor_pred * std::pow(d, fit.eps_slope_pred));
    ep.y.push_back(fit.energy_prefactor_pred * std::pow(d, fit.energy_slope_pred));
  }
  add_plot(out, cfg, "fit_epsilon.svg", svg_plot("blow-up scale", "1-(M/M*)^(r/n)", "epsilon", {se, sp}, true, true));
  add_plot(out, cfg, "fit_energy.svg", svg_plot("ground energy", "1-(M/M*)^(r/n)", "energy", {ee, ep}, true, true));

  out.summary = fmt::format("M* = {:.10g} (extrapolated {:.10g})\nmu = {:.10g}, q = {}\n", gm.m_star,
                            fit.m_star_extrapolated, mu.mu, mu.q_max);
  out.summary += fmt::format("epsilon slope {:.5f} (predicted {:.5f}), prefactor {:.5f} (predicted {:.5f})\n",
                             fit.eps.slope, fit.eps_slope_pred, fit.eps.prefactor(), fit.eps_prefactor_pred);
  out.summary += fmt::format("energy slope {:.5f} (predicted {:.5f}), prefactor {:.5f} (predicted {:.5f})\n",
                             fit.energy.slope, fit.energy_slope_pred, fit.energy.prefactor(),
                             fit.energy_prefactor_pred);
  if (conc.assertable)
    out.summary += fmt::format("concentration in Z0 within 4 epsilon above M/M* = 0.98: {}\n",
                               conc.selected ? "yes" : "no");
  else
    out.summary += "several wells tie for the smallest mu; selection is not asserted\n";
  note_abort(out, sw);
  const double lam_last = sw.entries.empty() ? NAN
                                             : lambda_scaled(sw.entries.back().report, n, r, gm.m_star);
  out.metrics.insert({{"m_star", gm.m_star},
                      {"m_star_extrapolated", fit.m_star_extrapolated},
                      {"mu", mu.mu},
                      {"eps_slope", fit.eps.slope},
                      {"eps_slope_pred", fit.eps_slope_pred},
                      {"eps_prefactor", fit.eps.prefactor()},
                      {"eps_prefactor_pred", fit.eps_prefactor_pred},
                      {"energy_slope", fit.energy.slope},
                      {"energy_slope_pred", fit.energy_slope_pred},
                      {"lambda_scaled_last", lam_last},
                      {"mass_frac_last", sw.entries.empty() ? NAN : sw.entries.back().report.mass / gm.m_star},
                      {"selected", conc.selected ? 1.0 : 0.0},
                      {"assertable", conc.assertable ? 1.0 : 0.0}});
  return out;
}

RunOutput run_regprobe(const RunConfig& cfg, int threads) {
  const ProblemSpec& spec = cfg.problem;
  const int n = spec.dim;
  const double p = cfg.regprobe_p.value_or(1.2 * n / spec.ham.r());
  const int n_fine = cfg.regprobe_n_fine > 0 ? cfg.regprobe_n_fine : 2 * spec.N - 1;
  ProbeOptions po;
  po.margin = cfg.regprobe_margin;
  po.q = cfg.regprobe_q;
  weighted_exponent(n, spec.ham, p, po.q);
  HjbOptions ho;
  ho.tol = spec.tol.hjb;
  ho.max_iter = spec.tol.hjb_max_iter;

  RunOutput out;
  out.subcommand = "regprobe";
  CsvTable t;
  t.columns = {"sample", "grid_n", "weighted_sup", "harnack_sup"};
  std::vector<std::vector<double>> W, K;
  for (int N : {spec.N, n_fine}) {
    const Grid g = make_grid(n, spec.L, N);
    const auto family = sample_rhs_family(g, p, cfg.regprobe_count, spec.seed);
    std::vector<double> w(family.size()), k(family.size());
    std::vector<std::exception_ptr> err(family.size());
    auto work = [&](std::size_t start, std::size_t stride) {
      for (std::size_t i = start; i < family.size(); i += stride) {
        try {
          const auto sol = solve_dirichlet(g, family[i], spec.ham, ho);
          w[i] = weighted_morrey_stat(sol.u, spec.ham, p, po).sup;
          k[i] = harnack_stat(sol.u, spec.ham, p, po).sup;
        } catch (...) {
          err[i] = std::current_exception();
        }
      }
    };
    const std::size_t nt = static_cast<std::size_t>(std::max(1, threads));
    std::vector<std::thread> pool;
    for (std::size_t s = 1; s < nt; ++s) pool.emplace_back(work, s, nt);
    work(0, nt);
    for (auto& th : pool) th.join();
    for (auto& e : err)
      if (e) std::rethrow_exception(e);
    for (std::size_t i = 0; i < family.size(); ++i) t.add({double(i), double(N), w[i], k[i]});
    W.push_back(std::move(w));
    K.push_back(std::move(k));
  }
  out.files.push_back(csv("regprobe.csv", t));

  auto max_of = [](const std::vector<double>& v) -> double { return v.empty() ? NAN : *std::max_element(v.begin(), v.end()); };
  auto median = [](std::vector<double> v) -> double {
    if (v.empty()) return NAN;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  };
  CsvTable s;
  s.columns = {"statistic", "coarse_max", "fine_max", "growth", "coarse_max_over_median", "fine_max_over_median"};
  for (const auto& [label, data] : {std::pair{"weighted_morrey", &W}, std::pair{"harnack", &K}}) {
    const double c = max_of((*data)[0]), fm = max_of((*data)[1]);
    const double cr = c / median((*data)[0]), fr = fm / median((*data)[1]);
    s.add_cells({label, f(c), f(fm), f(fm / c), f(cr), f(fr)});
    out.metrics[std::string(label) + "_growth"] = fm / c;
    out.metrics[std::string(label) + "_spread"] = std::max(cr, fr);
    out.summary += fmt::format("{}: max {:.6g} -> {:.6g} (growth {:.4f}), max/median {:.3f} / {:.3f}\n", label, c, fm,
                               fm / c, cr, fr);
  }
  out.files.push_back(csv("regprobe_summary.csv", s));
  out.metrics["p"] = p;
  return out;
}

RunOutput run_nls(const RunConfig& cfg) {
  const ProblemSpec& spec = cfg.problem;
  if (spec.ham.rprime != 2.0) throw ConfigError("nls-oracle needs rprime = 2");
  const bool free = spec.potential.is_zero();
  const MfgSolution sol = free ? potential_free_ground(spec, cfg.seed_mass) : solve_mfg(spec, spec.mass);
  const NlsResult nls = nls_oracle(spec, sol.mass());
  const Grid& g = sol.grid();
  std::vector<double> a = sol.pair.m().values(), b = nls.pair.m().values();
  if (free) {
    a = center_density(g, a);
    b = center_density(g, b);
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = std::abs(a[i] - b[i]);
  const double l1 = integrate(g, diff) / sol.mass();
  const double dl = std::abs(sol.lambda - nls.lambda) / std::abs(sol.lambda);

  RunOutput out;
  out.subcommand = "nls-oracle";
  CsvTable t;
  t.columns = {"mass_mfg", "mass_nls", "lambda_mfg", "lambda_nls", "lambda_rel_diff", "l1_rel", "mu", "iterations",
               "fixed_lambda"};
  t.add({sol.mass(), nls.mass, sol.lambda, nls.lambda, dl, l1, nls.mu, double(nls.iterations),
         nls.fixed_lambda ? 1.0 : 0.0});
  out.files.push_back(csv("nls.csv", t));
  CsvTable pr;
  pr.columns = g.dim == 1 ? std::vector<std::string>{"x", "m", "v2"} : std::vector<std::string>{"x", "y", "m", "v2"};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    if (g.dim == 1)
      pr.add({x[0], a[i], b[i]});
    else
      pr.add({x[0], x[1], a[i], b[i]});
  }
  out.files.push_back(csv("nls_profile.csv", pr));
  out.summary = fmt::format("||m - v^2||_1 / M = {:.4e}\nlambda: MFG {:.10g}, NLS {:.10g} (relative {:.3e})\n", l1,
                            sol.lambda, nls.lambda, dl);
  out.metrics = {{"l1_rel", l1}, {"lambda_rel_diff", dl}, {"mass_nls", nls.mass}, {"mass_mfg", sol.mass()}};
  return out;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"solve", "sweep", "gamma", "blowup", "regprobe", "nls-oracle"};
  return names;
}

RunOutput run_subcommand(const std::string& name, const RunConfig& cfg, int threads) {
  if (name == "solve") return run_solve(cfg);
  if (name == "sweep") return run_sweep(cfg);
  if (name == "gamma") return run_gamma(cfg);
  if (name == "blowup") return run_blowup(cfg);
  if (name == "regprobe") return run_regprobe(cfg, threads);
  if (name == "nls-oracle") return run_nls(cfg);
  throw ConfigError("unknown subcommand '" + name + "'");
}

void write_outputs(const std::filesystem::path& dir, const RunOutput& out) {
  nlohmann::ordered_json manifest;
  manifest["subcommand"] = out.subcommand;
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto& a : out.files) {
    write_atomic(dir / a.name, a.content);
    nlohmann::ordered_json entry;
    if (a.name.ends_with(".csv")) {
      const auto header = a.content.substr(0, a.content.find('\n'));
      nlohmann::ordered_json cols = nlohmann::ordered_json::object();
      std::size_t start = 0;
      for (;;) {
        const auto pos = header.find(',', start);
        const std::string c = header.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        const auto it = column_info().find(c);
        cols[c] = it == column_info().end() ? nlohmann::ordered_json{{"unit", ""}, {"meaning", ""}}
                                            : nlohmann::ordered_json{{"unit", it->second.unit},
                                                                     {"meaning", it->second.meaning}};
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
      entry["columns"] = cols;
    }
    files[a.name] = entry;
  }
  manifest["files"] = files;
  write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace mfg
