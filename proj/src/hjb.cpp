#include "mfg/hjb.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cfloat>
#include <cmath>

#include "mfg/error.hpp"
#include "scheme.hpp"

namespace mfg {

using detail::SpMat;

VectorField Drift::vector() const {
  std::array<std::vector<double>, 2> c;
  for (int k = 0; k < grid.dim; ++k) {
    c[k].resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) c[k][i] = a0[k][i] + am[k][i] + ap[k][i];
  }
  return VectorField(grid, std::move(c));
}

Drift split_drift(const VectorField& b, Closure closure) {
  const Grid& g = b.grid();
  Drift d;
  d.grid = g;
  d.closure = closure;
  for (int k = 0; k < g.dim; ++k) {
    d.a0[k].assign(g.size(), 0.0);
    d.am[k].assign(g.size(), 0.0);
    d.ap[k].assign(g.size(), 0.0);
    const auto& bk = b.component(k);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (closure == Closure::Dirichlet && detail::on_boundary(g, i)) continue;
      const int ik = g.multi(i)[k];
      const bool wall = closure != Closure::Periodic && (ik == 0 || ik == g.N - 1);
      if (!wall && std::abs(bk[i]) * g.h <= 1.0) {
        d.a0[k][i] = bk[i];
      } else if (bk[i] > 0.0) {
        if (!(wall && ik == 0)) d.am[k][i] = bk[i];
      } else {
        if (!(wall && ik == g.N - 1)) d.ap[k][i] = bk[i];
      }
    }
  }
  return d;
}

namespace {

double roundoff_floor(const Grid& g, const std::vector<double>& u, const std::vector<double>& f, double lambda) {
  const double scale = 4.0 * g.dim * detail::sup_norm(u) / (g.h * g.h) + detail::sup_norm(f) + std::abs(lambda);
  return 16.0 * DBL_EPSILON * scale;
}

// Copy of A with column `pin` replaced by ones (the lambda unknown).
SpMat border(const SpMat& A, int pin) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(A.nonZeros() + A.rows());
  for (int c = 0; c < A.outerSize(); ++c) {
    if (c == pin) continue;
    for (SpMat::InnerIterator it(A, c); it; ++it) t.emplace_back(it.row(), c, it.value());
  }
  for (int r = 0; r < A.rows(); ++r) t.emplace_back(r, pin, 1.0);
  SpMat B(A.rows(), A.cols());
  B.setFromTriplets(t.begin(), t.end());
  return B;
}

std::vector<double> residual_vec(const detail::Evaluation& ev, double lambda, const std::vector<double>& f,
                                 bool with_lambda) {
  std::vector<double> r(ev.base.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = ev.base[i] + (with_lambda ? lambda - f[i] : -f[i]);
  return r;
}

ErgodicSolution newton(const Grid& g, const ScalarField& fld, const HamiltonianSpec& ham, const HjbOptions& opt,
                       const ErgodicSolution* init, bool ergodic) {
  if (fld.grid() != g) throw ConfigError("right-hand side lives on a different grid");
  if (!(opt.tol > 0.0)) throw ConfigError("HJB tolerance must be positive");
  const std::vector<double>& f = fld.values();
  const std::size_t n = g.size();
  std::vector<double> f_eff = f;
  if (!ergodic)
    for (std::size_t i = 0; i < n; ++i)
      if (detail::on_boundary(g, i)) f_eff[i] = 0.0;

  std::vector<double> u(n, 0.0);
  double lambda = ergodic ? *std::min_element(f.begin(), f.end()) : 0.0;
  SchemeMask mask;
  mask.closure = ergodic ? opt.closure : Closure::Dirichlet;
  if (init && init->u.grid() == g && init->mask.closure == mask.closure) {
    u = init->u.values();
    lambda = init->lambda;
    mask = init->mask;
  }

  std::vector<double> history;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  for (int it = 0; it <= opt.max_iter; ++it) {
    const bool update = it < opt.mask_updates;
    detail::Evaluation ev = detail::evaluate(g, ham, u, mask, update);
    std::vector<double> F = residual_vec(ev, lambda, f_eff, ergodic);
    const double res = detail::sup_norm(F);
    if (!std::isfinite(res)) throw NumericError("NaN detected in HJB residual");
    history.push_back(res);
    const double tol_eff = std::max(opt.tol, roundoff_floor(g, u, f, lambda));
    if (res <= tol_eff) {
      ErgodicSolution sol;
      if (ergodic) {
        const double umin = *std::min_element(u.begin(), u.end());
        for (double& x : u) x -= umin;
      } else {
        for (std::size_t i = 0; i < n; ++i)
          if (detail::on_boundary(g, i)) u[i] = 0.0;
      }
      sol.u = ScalarField(g, std::move(u));
      sol.lambda = lambda;
      sol.normalization = ergodic ? "min-zero" : "dirichlet-zero";
      sol.residual_norm = res;
      sol.iterations = it;
      sol.mask = std::move(mask);
      return sol;
    }
    if (it == opt.max_iter) break;

    SpMat J = detail::linearize(ev.drift);
    int pin = -1;
    if (ergodic) {
      pin = static_cast<int>(argmin_node(u));
      const double shift = u[pin];
      for (double& x : u) x -= shift;
      J = border(J, pin);
    }
    J.makeCompressed();
    lu.compute(J);
    if (lu.info() != Eigen::Success) throw NumericError("HJB Jacobian factorization failed");
    Eigen::Map<const Eigen::VectorXd> rhs(F.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd d = lu.solve(-rhs);
    if (lu.info() != Eigen::Success) throw NumericError("HJB linear solve failed");
    double dlambda = 0.0;
    if (ergodic) {
      dlambda = d[pin];
      d[pin] = 0.0;
    }
    // Backtracking: halve the step while the residual does not decrease.
    double t = 1.0;
    std::vector<double> trial(n);
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * d[static_cast<Eigen::Index>(i)];
      SchemeMask m2 = mask;
      detail::Evaluation e2 = detail::evaluate(g, ham, trial, m2, false);
      const double r2 = detail::sup_norm(residual_vec(e2, lambda + t * dlambda, f_eff, ergodic));
      if ((std::isfinite(r2) && r2 < res) || t < 1e-3) break;
      t *= 0.5;
    }
    u.swap(trial);
    lambda += t * dlambda;
  }
  throw DivergedError("HJB Newton iteration did not converge", history);
}

}  // namespace

ErgodicSolution solve_ergodic(const Grid& g, const ScalarField& f, const HamiltonianSpec& ham,
                              const HjbOptions& opt, const ErgodicSolution* init) {
  if (opt.closure == Closure::Dirichlet) throw ConfigError("use solve_dirichlet for the Dirichlet closure");
  return newton(g, f, ham, opt, init, true);
}

ErgodicSolution solve_ergodic(const Grid& g, const ScalarField& f, const HamiltonianSpec& ham, double tol,
                              int max_iter) {
  HjbOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return solve_ergodic(g, f, ham, opt);
}

ErgodicSolution solve_dirichlet(const Grid& g, const ScalarField& f, const HamiltonianSpec& ham,
                                const HjbOptions& opt) {
  return newton(g, f, ham, opt, nullptr, false);
}

namespace {

detail::Evaluation evaluate_solution(const ErgodicSolution& sol, const HamiltonianSpec& ham) {
  SchemeMask mask = sol.mask;
  return detail::evaluate(sol.u.grid(), ham, sol.u.values(), mask, mask.empty());
}

}  // namespace

ScalarField hjb_residual(const ErgodicSolution& sol, const ScalarField& f, const HamiltonianSpec& ham) {
  const Grid& g = sol.u.grid();
  detail::Evaluation ev = evaluate_solution(sol, ham);
  const bool ergodic = sol.mask.closure != Closure::Dirichlet;
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!ergodic && detail::on_boundary(g, i))
      r[i] = ev.base[i];
    else
      r[i] = ev.base[i] + (ergodic ? sol.lambda : 0.0) - f[i];
  }
  return ScalarField(g, std::move(r));
}

Drift drift_split(const ErgodicSolution& sol, const HamiltonianSpec& ham) {
  return evaluate_solution(sol, ham).drift;
}

VectorField drift_from_u(const ErgodicSolution& sol, const HamiltonianSpec& ham) {
  return drift_split(sol, ham).vector();
}

std::vector<double> scheme_gradient_norm(const ErgodicSolution& sol, const HamiltonianSpec& ham) {
  return evaluate_solution(sol, ham).pnorm;
}

GradientBoundReport gradient_bound_check(const ErgodicSolution& sol, const ScalarField& V,
                                         const HamiltonianSpec& ham) {
  const auto p = scheme_gradient_norm(sol, ham);
  GradientBoundReport rep;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double c = p[i] / std::pow(1.0 + V[i], 1.0 / ham.rprime);
    if (c > rep.constant) {
      rep.constant = c;
      rep.node = i;
    }
  }
  return rep;
}

double gradient_bound_growth(const std::vector<GradientBoundReport>& reports) {
  double lo = INFINITY, hi = 0.0;
  for (const auto& r : reports) {
    lo = std::min(lo, r.constant);
    hi = std::max(hi, r.constant);
  }
  return (reports.empty() || lo == 0.0) ? 1.0 : hi / lo;
}

}  // namespace mfg
