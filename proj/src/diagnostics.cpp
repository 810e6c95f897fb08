#include "mfg/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "mfg/error.hpp"

namespace mfg {

PohozaevResult pohozaev_residuals(const FlowPair& pair, double lambda, double alpha, const HamiltonianSpec& ham,
                                  const ErgodicSolution* u) {
  const double n = pair.grid().dim, r = ham.r();
  const double I = coupling_integral(pair, alpha);
  if (!(I > 0.0)) throw DegenerateError("Pohozaev residuals need a nonzero coupling integral");
  const double kin = kinetic(pair, ham);
  PohozaevResult res;
  res.res1 = std::abs(lambda * pair.mass() + ((alpha + 1.0) * r - n * alpha) / ((alpha + 1.0) * r) * I) / I;
  res.res2 = std::abs(kin - n * alpha / ((alpha + 1.0) * r) * I) / I;
  if (u) {
    const auto p = scheme_gradient_norm(*u, ham);
    std::vector<double> v(p.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = pair.m()[i] * std::pow(p[i], ham.rprime);
    const double third = (ham.rprime - 1.0) * ham.c_h * integrate(pair.grid(), v);
    res.res3 = std::abs(third - kin) / kin;
  }
  return res;
}

PohozaevResult pohozaev_residuals(const MfgSolution& sol, double alpha, const HamiltonianSpec& ham) {
  if (!sol.potential_free) throw DomainMisuseError("Pohozaev identities hold only for V = 0 solutions");
  return pohozaev_residuals(sol.pair, sol.lambda, alpha, ham, &sol.u);
}

double mstar_from_gamma(double gamma, int n, double r) { return std::pow((1.0 + r / n) * gamma, n / r); }

double gamma_from_mstar(double m_star, int n, double r) { return n / (n + r) * std::pow(m_star, r / n); }

GammaResult gamma_and_mstar(const ProblemSpec& spec, double seed_mass) {
  if (!spec.potential.is_zero()) throw DomainMisuseError("gamma_and_mstar needs V = 0");
  if (!spec.alpha_critical) throw ConfigError("gamma_and_mstar needs alpha = critical");
  GammaResult out;
  out.ground = potential_free_ground(spec, seed_mass);
  const int n = spec.dim;
  const double r = spec.ham.r();
  out.gamma = gn_ratio(out.ground.pair, r / n, spec.ham);
  out.m_star = mstar_from_gamma(out.gamma, n, r);
  out.identity_defect = std::abs(out.gamma - gamma_from_mstar(out.m_star, n, r));
  out.ground_mass = out.ground.mass();
  return out;
}

DiagnosticsReport make_report(const MfgSolution& sol) {
  const HamiltonianSpec& ham = sol.ham;
  const Grid& g = sol.grid();
  const int n = g.dim;
  const double r = ham.r();
  DiagnosticsReport rep;
  rep.mass = sol.mass();
  rep.kinetic = kinetic(sol.pair, ham);
  rep.epsilon = rep.kinetic > 0.0 ? std::pow(rep.kinetic, -1.0 / r) : INFINITY;
  rep.coupling = coupling_integral(sol.pair, sol.alpha);
  if (rep.kinetic > 0.0 && std::isfinite(rep.kinetic)) {
    rep.gamma = gn_ratio(sol.pair, r / n, ham);
    rep.m_star = mstar_from_gamma(rep.gamma, n, r);
    rep.fp_constant = rep.coupling / (std::pow(rep.mass, ((sol.alpha + 1.0) * r - n * sol.alpha) / r) *
                                      std::pow(rep.kinetic / ham.c_l(), n * sol.alpha / r));
  }
  rep.lambda = sol.lambda;
  rep.energy = sol.energy;
  rep.x_eps = g.point(argmin_node(sol.u.u.values()));
  rep.x_bar = g.point(argmax_node(sol.pair.m().values()));
  if (sol.potential_free) {
    const auto p = pohozaev_residuals(sol, sol.alpha, ham);
    rep.pohozaev_res1 = p.res1;
    rep.pohozaev_res2 = p.res2;
    rep.pohozaev_res3 = p.res3;
  }
  return rep;
}

RescaledProfile rescaled_profile(const MfgSolution& sol, const HamiltonianSpec& ham, double window, int n_ref) {
  const Grid& g = sol.grid();
  const int n = g.dim;
  const double kin = kinetic(sol.pair, ham);
  if (!(kin > 0.0) || !std::isfinite(kin)) throw DegenerateError("rescaling needs a finite positive kinetic term");
  const double eps = std::pow(kin, -1.0 / ham.r());
  if (eps < 2.0 * g.h) throw UnderResolvedError("epsilon below 2h; profile is under-resolved");
  if (n_ref == 0) n_ref = n == 1 ? 1201 : 121;
  RescaledProfile out;
  out.grid = make_grid(n, window, n_ref);
  out.eps = eps;
  out.x_eps = g.point(argmin_node(sol.u.u.values()));
  const Grid& R = out.grid;
  const double su = std::pow(eps, (2.0 - ham.rprime) / (ham.rprime - 1.0));
  const double sm = std::pow(eps, n), sw = std::pow(eps, n + 1);
  std::vector<double> m(R.size()), u(R.size());
  std::array<std::vector<double>, 2> w;
  for (int k = 0; k < n; ++k) w[k].resize(R.size());
  for (std::size_t i = 0; i < R.size(); ++i) {
    const Point y = R.point(i);
    const Point x{eps * y[0] + out.x_eps[0], n == 2 ? eps * y[1] + out.x_eps[1] : 0.0};
    m[i] = sm * interpolate(g, sol.pair.m().values(), x);
    u[i] = su * interpolate(g, sol.u.u.values(), x, true);
    for (int k = 0; k < n; ++k) w[k][i] = sw * interpolate(g, sol.pair.w().component(k), x);
  }
  out.m = ScalarField(R, std::move(m));
  out.u = ScalarField(R, std::move(u));
  out.w = VectorField(R, std::move(w));
  return out;
}

namespace {

double h_value_at(const Grid& g, const std::vector<double>& q, const std::vector<double>& m0, double a, double qe,
                  const Point& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < m0.size(); ++i) {
    if (m0[i] == 0.0) continue;
    const Point x = g.point(i);
    s += q[i] * m0[i] * std::pow(std::hypot(x[0] + y[0], x[1] + y[1]), qe);
  }
  return a * s;
}

}  // namespace

MuTable mu_weights(const PotentialSpec& potential, const ScalarField& m0) {
  const Grid& g = m0.grid();
  const auto q = quadrature_weights(g);
  const auto wells = well_table(potential);
  const Point c = centroid(g, m0.values());
  MuTable t;
  for (const auto& w : wells) t.q_max = std::max(t.q_max, w.q);
  for (const auto& w : wells) {
    MuEntry e;
    e.center = w.center;
    e.a = w.a;
    e.q = w.q;
    e.flattest = w.q == t.q_max;
    auto H = [&](const Point& y) { return h_value_at(g, q, m0.values(), w.a, w.q, y); };
    // Coarse scan around -centroid, then coordinate descent with step halving.
    const double span = 2.0, s0 = 0.1;
    const int k = static_cast<int>(std::round(span / s0));
    Point best{-c[0], g.dim == 2 ? -c[1] : 0.0};
    double hb = H(best);
    for (int i = -k; i <= k; ++i)
      for (int j = (g.dim == 2 ? -k : 0); j <= (g.dim == 2 ? k : 0); ++j) {
        const Point y{-c[0] + i * s0, g.dim == 2 ? -c[1] + j * s0 : 0.0};
        const double hy = H(y);
        if (hy < hb) {
          hb = hy;
          best = y;
        }
      }
    for (double step = s0; step > 1e-6;) {
      bool moved = false;
      for (int ax = 0; ax < g.dim; ++ax)
        for (int sgn : {-1, 1}) {
          Point y = best;
          y[ax] += sgn * step;
          const double hy = H(y);
          if (hy < hb) {
            hb = hy;
            best = y;
            moved = true;
          }
        }
      if (!moved) step *= 0.5;
    }
    e.y = best;
    e.mu = hb;
    t.wells.push_back(e);
  }
  double mu_min = INFINITY;
  for (std::size_t i = 0; i < t.wells.size(); ++i)
    if (t.wells[i].flattest) {
      t.Z.push_back(i);
      mu_min = std::min(mu_min, t.wells[i].mu);
    }
  t.mu = mu_min;
  for (std::size_t i : t.Z)
    if (t.wells[i].mu <= mu_min * (1.0 + 1e-9)) {
      t.Z0.push_back(i);
      t.wells[i].in_z0 = true;
    }
  return t;
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

FitResult blowup_fit(const std::vector<DiagnosticsReport>& sweep, double q, double mu, double m_star, int n,
                     double r, double lo, double hi) {
  FitResult f;
  std::vector<double> lx, le, lE, mr, ep;
  for (const auto& rep : sweep) {
    const double frac = rep.mass / m_star;
    if (frac < lo - 1e-12 || frac > hi + 1e-12) continue;
    const double delta = 1.0 - std::pow(frac, r / n);
    if (!(delta > 0.0) || !(rep.epsilon > 0.0) || !(rep.energy > 0.0)) continue;
    f.mass_frac.push_back(frac);
    f.delta.push_back(delta);
    f.epsilon.push_back(rep.epsilon);
    f.energy_values.push_back(rep.energy);
    lx.push_back(std::log(delta));
    le.push_back(std::log(rep.epsilon));
    lE.push_back(std::log(rep.energy));
    mr.push_back(std::pow(rep.mass, r / n));
    ep.push_back(std::pow(rep.epsilon, r + q));
  }
  f.points = lx.size();
  if (f.points < 5) throw FitError("blow-up fit needs at least 5 points in the asymptotic window");
  f.eps = least_squares(lx, le);
  f.energy = least_squares(lx, lE);
  f.eps_slope_pred = 1.0 / (r + q);
  f.eps_prefactor_pred = std::pow(r / (q * mu), 1.0 / (r + q));
  f.energy_slope_pred = q / (r + q);
  f.energy_prefactor_pred = (q + r) / q * std::pow(q * mu / r, r / (r + q));
  for (std::size_t i = 0; i < f.points; ++i) {
    f.eps_ratio.push_back(f.epsilon[i] / (f.eps_prefactor_pred * std::pow(f.delta[i], f.eps_slope_pred)));
    f.energy_ratio.push_back(f.energy_values[i] /
                             (f.energy_prefactor_pred * std::pow(f.delta[i], f.energy_slope_pred)));
  }
  // eps^{r+q} is affine in M^{r/n} to leading order and vanishes at M*.
  const LineFit ext = least_squares(mr, ep);
  f.m_star_extrapolated = std::pow(-ext.intercept / ext.slope, n / r);
  return f;
}

ConcentrationReport concentration_check(const std::vector<DiagnosticsReport>& sweep, const PotentialSpec& potential,
                                        const MuTable& table, double m_star, double frac_threshold) {
  ConcentrationReport rep;
  const auto wells = well_table(potential);
  rep.admissible = table.Z0;
  rep.assertable = table.Z0.size() == 1;
  rep.selected = true;
  for (const auto& d : sweep) {
    ConcentrationPoint p;
    p.mass_frac = d.mass / m_star;
    double best = INFINITY;
    for (std::size_t i = 0; i < wells.size(); ++i) {
      const double dist = std::hypot(d.x_eps[0] - wells[i].center[0], d.x_eps[1] - wells[i].center[1]);
      if (dist < best) {
        best = dist;
        p.nearest = i;
      }
    }
    p.distance = best;
    p.dist_over_eps = best / d.epsilon;
    if (!wells.empty())
      p.offset_over_eps = {(d.x_eps[0] - wells[p.nearest].center[0]) / d.epsilon,
                           (d.x_eps[1] - wells[p.nearest].center[1]) / d.epsilon};
    p.in_z0 = std::find(table.Z0.begin(), table.Z0.end(), p.nearest) != table.Z0.end();
    rep.max_xbar_ratio =
        std::max(rep.max_xbar_ratio, std::hypot(d.x_bar[0] - d.x_eps[0], d.x_bar[1] - d.x_eps[1]) / d.epsilon);
    if (p.mass_frac >= frac_threshold - 1e-12) {
      ++rep.checked;
      if (!p.in_z0 || p.dist_over_eps > 4.0) rep.selected = false;
    }
    rep.points.push_back(p);
  }
  if (rep.checked == 0) rep.selected = false;
  return rep;
}

}  // namespace mfg
