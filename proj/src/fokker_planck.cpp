#include "mfg/fokker_planck.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "mfg/error.hpp"
#include "scheme.hpp"

namespace mfg {

using detail::SpMat;

namespace {

using Solver = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

// Inverse iteration from a given start; returns the max-normalized iterate.
Eigen::VectorXd inverse_iteration(Solver& lu, Eigen::VectorXd m, const FpOptions& opt, bool& converged) {
  converged = false;
  m /= m.cwiseAbs().maxCoeff();
  for (int k = 0; k < opt.max_iter; ++k) {
    Eigen::VectorXd next = lu.solve(m);
    if (lu.info() != Eigen::Success || !next.allFinite()) throw NumericError("FP linear solve failed");
    const Eigen::Index imax = [&] {
      Eigen::Index j;
      next.cwiseAbs().maxCoeff(&j);
      return j;
    }();
    next /= next[imax];
    const double change = (next - m).cwiseAbs().maxCoeff();
    m.swap(next);
    if (k >= 1 && change <= opt.tol) {
      converged = true;
      break;
    }
  }
  return m;
}

}  // namespace

ScalarField solve_invariant(const Drift& drift, double M, const FpOptions& opt) {
  if (!(M > 0.0) || !std::isfinite(M)) throw ConfigError("mass must be positive");
  const Grid& g = drift.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  SpMat AT = SpMat(detail::linearize(drift).transpose());
  SpMat shift(n, n);
  shift.setIdentity();
  AT += opt.regularization * shift;
  AT.makeCompressed();
  Solver lu;
  lu.compute(AT);
  if (lu.info() != Eigen::Success) throw NumericError("FP factorization failed");

  bool ok = false;
  Eigen::VectorXd m = inverse_iteration(lu, Eigen::VectorXd::Ones(n), opt, ok);
  if (!ok) throw DegenerateError("FP inverse iteration stagnated; kernel is not one-dimensional");
  if (opt.check_kernel) {
    // A second, structurally different start must land on the same kernel vector.
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s[i] = 1.0 + 0.5 * std::cos(0.7 * static_cast<double>(i));
    bool ok2 = false;
    Eigen::VectorXd m2 = inverse_iteration(lu, s, opt, ok2);
    if (!ok2 || (m2 - m).cwiseAbs().sum() > 1e-6 * m.cwiseAbs().sum())
      throw DegenerateError("FP kernel dimension exceeds one (start-dependent kernel vector)");
  }
  const double mmax = m.maxCoeff();
  if (m.minCoeff() < -1e-14 * mmax) throw SchemeError("FP kernel vector has negative entries");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) v[i] = m[i] < 1e-16 * mmax ? 0.0 : m[i];
  const double mass = integrate(g, v);
  for (double& x : v) x *= M / mass;
  return ScalarField(g, std::move(v));
}

ScalarField solve_invariant(const Grid& g, const VectorField& drift, double M, Closure closure,
                            const FpOptions& opt) {
  if (drift.grid() != g) throw ConfigError("drift lives on a different grid");
  return solve_invariant(split_drift(drift, closure), M, opt);
}

VectorField flux_w(const ScalarField& m, const ErgodicSolution& sol, const HamiltonianSpec& ham) {
  const Grid& g = m.grid();
  if (sol.u.grid() != g) throw ConfigError("density and value function on different grids");
  const VectorField b = drift_from_u(sol, ham);
  std::array<std::vector<double>, 2> w;
  for (int k = 0; k < g.dim; ++k) {
    w[k].resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) w[k][i] = -m[i] * b.component(k)[i];
  }
  return VectorField(g, std::move(w));
}

std::vector<double> apply_operator(const Drift& drift, const std::vector<double>& u) {
  const SpMat A = detail::linearize(drift);
  Eigen::Map<const Eigen::VectorXd> x(u.data(), static_cast<Eigen::Index>(u.size()));
  Eigen::VectorXd y = A * x;
  return {y.data(), y.data() + y.size()};
}

std::vector<double> apply_adjoint(const Drift& drift, const std::vector<double>& m) {
  const SpMat AT = SpMat(detail::linearize(drift).transpose());
  Eigen::Map<const Eigen::VectorXd> x(m.data(), static_cast<Eigen::Index>(m.size()));
  Eigen::VectorXd y = AT * x;
  return {y.data(), y.data() + y.size()};
}

TestFunction TestFunction::bump(const Point& c, double R) {
  TestFunction t;
  t.value = [c, R](const Point& x) {
    const double s = ((x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1])) / (R * R);
    return s < 1.0 ? std::pow(1.0 - s, 3) : 0.0;
  };
  t.grad = [c, R](const Point& x) -> Point {
    const double s = ((x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1])) / (R * R);
    if (s >= 1.0) return {0.0, 0.0};
    const double f = -6.0 * (1.0 - s) * (1.0 - s) / (R * R);
    return {f * (x[0] - c[0]), f * (x[1] - c[1])};
  };
  return t;
}

TestFunction TestFunction::quadratic(const Point& c) {
  TestFunction t;
  t.value = [c](const Point& x) {
    return 0.5 * ((x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]));
  };
  t.grad = [c](const Point& x) -> Point { return {x[0] - c[0], x[1] - c[1]}; };
  return t;
}

VectorField central_gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  std::array<std::vector<double>, 2> d;
  for (int k = 0; k < g.dim; ++k) {
    d[k].resize(g.size());
    const std::size_t s = g.stride(k);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const int ik = g.multi(i)[k];
      if (ik == 0)
        d[k][i] = (f[i + s] - f[i]) / g.h;
      else if (ik == g.N - 1)
        d[k][i] = (f[i] - f[i - s]) / g.h;
      else
        d[k][i] = (f[i + s] - f[i - s]) / (2.0 * g.h);
    }
  }
  return VectorField(g, std::move(d));
}

double fp_weak_residual(const ScalarField& m, const VectorField& w, const std::vector<TestFunction>& tests) {
  const Grid& g = m.grid();
  const VectorField dm = central_gradient(m);
  const auto q = quadrature_weights(g);
  double worst = 0.0;
  for (const auto& t : tests) {
    double lhs = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point gp = t.grad(g.point(i));
      for (int k = 0; k < g.dim; ++k) {
        lhs += q[i] * (dm.component(k)[i] - w.component(k)[i]) * gp[k];
        norm2 += q[i] * gp[k] * gp[k];
      }
    }
    if (norm2 > 0.0) worst = std::max(worst, std::abs(lhs) / std::sqrt(norm2));
  }
  return worst;
}

}  // namespace mfg
