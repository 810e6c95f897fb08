#include "mfg/ground_state.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "mfg/error.hpp"
#include "mfg/fokker_planck.hpp"

namespace mfg {

namespace {

HjbOptions hjb_options(const ProblemSpec& s) {
  HjbOptions o;
  o.tol = s.tol.hjb;
  o.max_iter = s.tol.hjb_max_iter;
  return o;
}

FpOptions fp_options(const ProblemSpec& s) {
  FpOptions o;
  o.tol = s.tol.fp;
  return o;
}

double l1_distance(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
  const auto q = quadrature_weights(g);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += q[i] * std::abs(a[i] - b[i]);
  return s;
}

void rescale_mass(const Grid& g, std::vector<double>& m, double M) {
  const double cur = integrate(g, m);
  if (!(cur > 0.0)) throw NumericError("density lost all mass");
  for (double& x : m) x *= M / cur;
}

std::vector<double> gaussian(const Grid& g, const Point& c, double width) {
  std::vector<double> m(g.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Point x = g.point(i);
    const double r2 = (x[0] - c[0]) * (x[0] - c[0]) + (g.dim == 2 ? (x[1] - c[1]) * (x[1] - c[1]) : 0.0);
    m[i] = std::exp(-r2 / (width * width));
  }
  return m;
}

std::vector<double> default_initial(const ProblemSpec& spec, const Grid& g, const ScalarField& V) {
  if (spec.potential.is_zero()) return gaussian(g, {0.0, 0.0}, 1.0);
  std::vector<double> m(g.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(-std::min(V[i], 700.0));
  return m;
}

ScalarField coupling_rhs(const ScalarField& V, const std::vector<double>& m, double alpha, double kappa) {
  std::vector<double> f(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) f[i] = V[i] - kappa * std::pow(m[i], alpha);
  return ScalarField(V.grid(), std::move(f));
}

double epsilon_of(const ScalarField& m, const ErgodicSolution& sol, const HamiltonianSpec& ham) {
  const double k = kinetic(FlowPair(m, flux_w(m, sol, ham)), ham);
  return k > 0.0 ? std::pow(k, -1.0 / ham.r()) : INFINITY;
}

void guard(const ProblemSpec& spec, const Grid& g, const ScalarField& m, const ErgodicSolution& sol) {
  if (m.max() > spec.density_cap)
    throw UnderResolvedError("under-resolved blow-up: density exceeds the cap; use a smaller mass or a finer grid");
  if (epsilon_of(m, sol, spec.ham) < 2.0 * g.h)
    throw UnderResolvedError("under-resolved blow-up: epsilon below 2h; use a smaller mass or a finer grid");
}

MfgSolution assemble(const ProblemSpec& spec, const ScalarField& V, ScalarField m, ErgodicSolution sol,
                     int iterations, std::vector<double> history, double M, bool potential_free, double kappa) {
  MfgSolution out;
  VectorField w = flux_w(m, sol, spec.ham);
  out.pair = FlowPair(std::move(m), std::move(w));
  out.lambda = sol.lambda;
  out.alpha = spec.alpha();
  out.ham = spec.ham;
  out.energy = total_energy(out.pair, V, out.alpha, spec.ham);
  out.converged = true;
  out.iterations = iterations;
  out.residual = sol.residual_norm + history.back() + std::abs(out.pair.mass() - M) / M;
  out.history = std::move(history);
  out.potential_free = potential_free;
  out.coupling = kappa;
  out.u = std::move(sol);
  return out;
}

// Even part under x -> -x; reversing the node index reflects the symmetric grid.
std::vector<double> symmetrize(const std::vector<double>& m) {
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = 0.5 * (m[i] + m[m.size() - 1 - i]);
  return out;
}

// Damped Picard loop at fixed mass. pin: recentre m every iteration.
MfgSolution fixed_mass_loop(const ProblemSpec& spec, double M, std::vector<double> m, bool pin) {
  const Grid g = spec.grid();
  const ScalarField V = potential_field(spec.potential, g);
  const double alpha = spec.alpha();
  rescale_mass(g, m, M);
  if (pin) m = symmetrize(center_density(g, m));
  double theta = spec.damping, prev = INFINITY;
  std::vector<double> history;
  std::optional<ErgodicSolution> warm;
  for (int k = 0; k < spec.tol.max_iter; ++k) {
    ErgodicSolution sol =
        solve_ergodic(g, coupling_rhs(V, m, alpha, 1.0), spec.ham, hjb_options(spec), warm ? &*warm : nullptr);
    ScalarField mt = solve_invariant(drift_split(sol, spec.ham), M, fp_options(spec));
    guard(spec, g, mt, sol);
    // Translation is a zero mode when pinned; compare modulo the odd part.
    if (pin) mt = ScalarField(g, symmetrize(mt.values()));
    const double d = l1_distance(g, mt.values(), m) / M;
    history.push_back(d);
    if (d <= spec.tol.fixpoint)
      return assemble(spec, V, std::move(mt), std::move(sol), k + 1, std::move(history), M, spec.potential.is_zero(),
                      1.0);
    if (d > prev) theta = std::max(0.5 * theta, 0.02);
    prev = d;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = (1.0 - theta) * m[i] + theta * mt[i];
    warm = std::move(sol);
  }
  throw DivergedError("MFG fixed point did not converge within max_iter", history);
}

// Critical potential-free loop: lambda held at the gauge, coupling kappa solved for.
MfgSolution gauge_loop(const ProblemSpec& spec, double seed_mass) {
  const Grid g = spec.grid();
  const ScalarField V = ScalarField::constant(g, 0.0);
  const double alpha = spec.alpha();
  const double lam_t = spec.lambda_gauge ? *spec.lambda_gauge : spec.default_gauge();
  const double b = std::pow(-lam_t / spec.ham.c_h, 1.0 / spec.ham.rprime) * spec.ham.c_h * spec.ham.rprime;
  std::vector<double> m = gaussian(g, {0.0, 0.0}, std::sqrt(5.0) / b);
  rescale_mass(g, m, seed_mass);
  double kappa = 2.0 * std::abs(lam_t) / std::pow(*std::max_element(m.begin(), m.end()), alpha);
  const double lam_base = std::max(1e-12 * std::abs(lam_t), 10.0 * spec.tol.hjb);

  std::optional<ErgodicSolution> warm;
  auto lambda_at = [&](double log_kappa) {
    ErgodicSolution s = solve_ergodic(g, coupling_rhs(V, m, alpha, std::exp(log_kappa)), spec.ham,
                                      hjb_options(spec), warm ? &*warm : nullptr);
    warm = std::move(s);
    return warm->lambda - lam_t;
  };
  // The HJB solve may stop at its roundoff floor; lambda is not resolved below that.
  auto lam_tol_now = [&] { return std::max(lam_base, 10.0 * warm->residual_norm); };

  double theta = spec.damping, prev = INFINITY, step0 = 0.05;
  std::vector<double> history;
  for (int k = 0; k < spec.tol.max_iter; ++k) {
    // Bracket lambda(kappa) = lam_t in log kappa, then Illinois.
    double a = std::log(kappa), fa = lambda_at(a);
    double c = a;
    if (std::abs(fa) > lam_tol_now()) {
      double step = step0;
      double bb = fa < 0.0 ? a - step : a + step, fb = lambda_at(bb);
      for (int e = 0; fa * fb > 0.0; ++e) {
        if (e > 60) throw DivergedError("could not bracket the coupling for the gauge", history);
        step *= 2.0;
        a = bb;
        fa = fb;
        bb += fa < 0.0 ? -step : step;
        fb = lambda_at(bb);
      }
      double fc = fb;
      c = bb;
      for (int j = 0; j < 200 && std::abs(fc) > lam_tol_now(); ++j) {
        c = (a * fb - bb * fa) / (fb - fa);
        fc = lambda_at(c);
        if (fc * fb < 0.0) {
          a = bb;
          fa = fb;
        } else {
          fa *= 0.5;
        }
        bb = c;
        fb = fc;
      }
      if (std::abs(fc) > lam_tol_now()) throw DivergedError("coupling root-find did not converge", history);
      step0 = std::clamp(2.0 * std::abs(c - std::log(kappa)), 1e-4, 0.5);
    }
    kappa = std::exp(c);
    ErgodicSolution sol = *warm;
    ScalarField mt = solve_invariant(drift_split(sol, spec.ham), seed_mass, fp_options(spec));
    const double scale = std::pow(kappa, 1.0 / alpha);
    {
      std::vector<double> mh = mt.values();
      for (double& x : mh) x *= scale;
      guard(spec, g, ScalarField(g, std::move(mh)), sol);
    }
    const double d = l1_distance(g, mt.values(), m) / seed_mass;
    history.push_back(d);
    if (d <= spec.tol.fixpoint) {
      std::vector<double> mh = mt.values();
      for (double& x : mh) x *= scale;
      const double Mout = integrate(g, mh);
      return assemble(spec, V, ScalarField(g, std::move(mh)), std::move(sol), k + 1, std::move(history), Mout, true,
                      1.0 / kappa);
    }
    if (d > prev) theta = std::max(0.5 * theta, 0.02);
    prev = d;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = (1.0 - theta) * m[i] + theta * mt[i];
    m = center_density(g, m);
  }
  throw DivergedError("potential-free ground state did not converge within max_iter", history);
}

}  // namespace

Point centroid(const Grid& g, const std::vector<double>& m) {
  const auto q = quadrature_weights(g);
  double s = 0.0, c0 = 0.0, c1 = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Point x = g.point(i);
    s += q[i] * m[i];
    c0 += q[i] * m[i] * x[0];
    c1 += q[i] * m[i] * x[1];
  }
  return {c0 / s, c1 / s};
}

std::vector<double> center_density(const Grid& g, const std::vector<double>& m) {
  const Point c = centroid(g, m);
  if (std::abs(c[0]) < 1e-14 * g.h && std::abs(c[1]) < 1e-14 * g.h) return m;
  const double M = integrate(g, m);
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const Point x = g.point(i);
    out[i] = std::max(0.0, interpolate(g, m, {x[0] + c[0], x[1] + c[1]}));
  }
  rescale_mass(g, out, M);
  return out;
}

MfgSolution solve_mfg(const ProblemSpec& spec, double M, const std::optional<FlowPair>& init) {
  spec.validate();
  if (!(M > 0.0) || !std::isfinite(M)) throw ConfigError("mass must be positive");
  const Grid g = spec.grid();
  std::vector<double> m;
  if (init) {
    if (init->grid() != g) throw ConfigError("initial pair lives on a different grid");
    m = init->m().values();
  } else {
    m = default_initial(spec, g, potential_field(spec.potential, g));
  }
  return fixed_mass_loop(spec, M, std::move(m), spec.potential.is_zero());
}

MfgSolution potential_free_ground(const ProblemSpec& spec, double M) {
  spec.validate();
  if (!spec.potential.is_zero()) throw DomainMisuseError("potential_free_ground needs V = 0");
  if (!(M > 0.0)) throw ConfigError("seed mass must be positive");
  if (spec.alpha_critical) return gauge_loop(spec, M);
  return fixed_mass_loop(spec, M, gaussian(spec.grid(), {0.0, 0.0}, 1.0), true);
}

SweepResult continuation_sweep(const ProblemSpec& spec, const std::vector<double>& masses, const SweepOptions& opt) {
  SweepResult out;
  for (std::size_t i = 1; i < masses.size(); ++i)
    if (!(masses[i] > masses[i - 1])) throw ConfigError("sweep masses must be strictly increasing");
  if (masses.empty()) return out;
  const Grid g = spec.grid();

  std::vector<std::optional<FlowPair>> branches;
  if (opt.multistart) {
    const auto wells = well_table(spec.potential);
    for (const auto& w : wells) {
      const double width = spec.potential.kind == PotentialKind::Multiwell ? 0.25 * spec.potential.d : 1.0;
      auto m = gaussian(g, w.center, width);
      rescale_mass(g, m, masses[0]);
      branches.emplace_back(gradient_pair(ScalarField(g, std::move(m))));
    }
  }
  if (branches.empty()) branches.push_back(opt.init);
  std::vector<bool> alive(branches.size(), true);

  for (std::size_t i = 0; i < masses.size(); ++i) {
    std::optional<SweepEntry> best;
    std::string under;
    for (std::size_t b = 0; b < branches.size(); ++b) {
      if (!alive[b]) continue;
      try {
        MfgSolution sol = solve_mfg(spec, masses[i], branches[b]);
        branches[b] = sol.pair;
        if (!best || sol.energy < best->solution.energy) {
          best.emplace();
          best->report = make_report(sol);
          best->solution = std::move(sol);
          best->branch = b;
        }
      } catch (const UnderResolvedError& e) {
        alive[b] = false;
        under = e.what();
      } catch (const Error& e) {
        throw SweepError(std::string("sweep failed at mass index ") + std::to_string(i) + ": " + e.what(), i,
                         e.kind());
      }
    }
    if (!best) {
      out.aborted = true;
      out.abort_index = i;
      out.abort_reason = under;
      break;
    }
    out.entries.push_back(std::move(*best));
  }
  return out;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

bool boundary_node(const Grid& g, std::size_t i) {
  const auto m = g.multi(i);
  for (int k = 0; k < g.dim; ++k)
    if (m[k] == 0 || m[k] == g.N - 1) return true;
  return false;
}

// shift*I - mu*Delta_h + diag(V) on interior nodes, identity rows on the walls.
SpMat nls_operator(const Grid& g, double mu, double shift, const std::vector<double>& V) {
  std::vector<Eigen::Triplet<double>> t;
  const double h2 = g.h * g.h;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int row = static_cast<int>(i);
    if (boundary_node(g, i)) {
      t.emplace_back(row, row, 1.0);
      continue;
    }
    double diag = shift + V[i];
    for (int k = 0; k < g.dim; ++k) {
      const std::size_t s = g.stride(k);
      diag += 2.0 * mu / h2;
      t.emplace_back(row, static_cast<int>(i - s), -mu / h2);
      t.emplace_back(row, static_cast<int>(i + s), -mu / h2);
    }
    t.emplace_back(row, row, diag);
  }
  SpMat A(static_cast<int>(g.size()), static_cast<int>(g.size()));
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

double rayleigh_lambda(const Grid& g, const std::vector<double>& v, const std::vector<double>& V, double mu,
                       double alpha) {
  const ScalarField vf(g, v);
  const VectorField dv = central_gradient(vf);
  const auto q = quadrature_weights(g);
  double grad = 0.0, pot = 0.0, nl = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double gi = 0.0;
    for (int k = 0; k < g.dim; ++k) gi += dv.component(k)[i] * dv.component(k)[i];
    grad += q[i] * gi;
    pot += q[i] * V[i] * v[i] * v[i];
    nl += q[i] * std::pow(std::abs(v[i]), 2.0 * alpha + 2.0);
    l2 += q[i] * v[i] * v[i];
  }
  return (mu * grad + pot - nl) / l2;
}

FlowPair nls_pair(const Grid& g, const std::vector<double>& v, double mu, double c_h) {
  const VectorField dv = central_gradient(ScalarField(g, v));
  std::vector<double> m(v.size());
  std::array<std::vector<double>, 2> w;
  for (int k = 0; k < g.dim; ++k) w[k].resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    m[i] = v[i] * v[i];
    for (int k = 0; k < g.dim; ++k) w[k][i] = 2.0 * mu * c_h * v[i] * dv.component(k)[i];
  }
  return FlowPair(ScalarField(g, std::move(m)), VectorField(g, std::move(w)));
}

}  // namespace

NlsResult nls_oracle(const ProblemSpec& spec, double M) {
  spec.validate();
  if (spec.ham.rprime != 2.0) throw UnsupportedError("the NLS oracle requires rprime = 2");
  const Grid g = spec.grid();
  const double mu = 1.0 / spec.ham.c_h;
  const double alpha = spec.alpha();
  const std::vector<double> V = potential_field(spec.potential, g).values();
  const auto q = quadrature_weights(g);
  NlsResult res;
  res.mu = mu;

  if (spec.potential.is_zero() && spec.alpha_critical) {
    // Fixed-lambda Petviashvili iteration; the mass is an output.
    const double lam = spec.lambda_gauge ? *spec.lambda_gauge : spec.default_gauge();
    const double p = 2.0 * alpha + 1.0, gamma = p / (p - 1.0);
    const SpMat A = nls_operator(g, mu, -lam, V);
    Eigen::SparseLU<SpMat> lu(A);
    if (lu.info() != Eigen::Success) throw NumericError("NLS operator factorization failed");
    const double b = std::sqrt(-lam / mu);
    std::vector<double> v = gaussian(g, {0.0, 0.0}, 2.0 / b);
    for (double& x : v) x *= std::pow(-lam, 1.0 / (p - 1.0));
    Eigen::VectorXd vv = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    int it = 0;
    for (; it < 2000; ++it) {
      Eigen::VectorXd nv = vv.array().abs().pow(p - 1.0) * vv.array();
      for (std::size_t i = 0; i < g.size(); ++i)
        if (boundary_node(g, i)) nv[static_cast<Eigen::Index>(i)] = 0.0;
      const double S = vv.dot(A * vv) / vv.dot(nv);
      Eigen::VectorXd next = std::pow(S, gamma) * lu.solve(nv);
      const double change = (next - vv).cwiseAbs().maxCoeff() / next.cwiseAbs().maxCoeff();
      vv.swap(next);
      if (change < 1e-13) break;
    }
    if (it == 2000) throw DivergedError("Petviashvili iteration stagnated", {});
    v.assign(vv.data(), vv.data() + vv.size());
    for (double& x : v) x = std::abs(x);
    res.pair = nls_pair(g, v, mu, spec.ham.c_h);
    res.v = std::move(v);
    res.lambda = rayleigh_lambda(g, res.v, V, mu, alpha);
    res.lambda_target = lam;
    res.mass = res.pair.mass();
    res.iterations = it + 1;
    res.fixed_lambda = true;
    return res;
  }

  // Semi-implicit normalized gradient flow with mass renormalization each step.
  const double tau = 0.05;
  const SpMat A = nls_operator(g, mu, 1.0 / tau, V);
  Eigen::SparseLU<SpMat> lu(A);
  if (lu.info() != Eigen::Success) throw NumericError("NLS operator factorization failed");
  std::vector<double> v = gaussian(g, {0.0, 0.0}, std::sqrt(2.0));
  auto normalize = [&](std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += q[i] * x[i] * x[i];
    for (double& y : x) y *= std::sqrt(M / s);
  };
  normalize(v);
  double lam_prev = rayleigh_lambda(g, v, V, mu, alpha);
  int it = 0;
  for (; it < 200000; ++it) {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
      rhs[static_cast<Eigen::Index>(i)] =
          boundary_node(g, i) ? 0.0 : v[i] / tau + std::pow(std::abs(v[i]), 2.0 * alpha) * v[i];
    Eigen::VectorXd next = lu.solve(rhs);
    v.assign(next.data(), next.data() + next.size());
    normalize(v);
    const double lam = rayleigh_lambda(g, v, V, mu, alpha);
    if (!std::isfinite(lam)) throw NumericError("NaN in NLS gradient flow");
    const bool done = std::abs(lam - lam_prev) < 1e-10;
    lam_prev = lam;
    if (done) break;
  }
  if (it == 200000) throw DivergedError("NLS gradient flow stagnated", {});
  for (double& x : v) x = std::abs(x);
  res.pair = nls_pair(g, v, mu, spec.ham.c_h);
  res.v = std::move(v);
  res.lambda = lam_prev;
  res.lambda_target = lam_prev;
  res.mass = res.pair.mass();
  res.iterations = it + 1;
  return res;
}

}  // namespace mfg
