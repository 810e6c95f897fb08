#include "scheme.hpp"

#include <algorithm>
#include <cmath>

namespace mfg::detail {

namespace {

struct AxisNbr {
  int pos = 0;  // -1 low wall, +1 high wall, 0 interior
  std::size_t lo = 0, hi = 0;
};

AxisNbr neighbors(const Grid& g, Closure c, std::size_t i, int k) {
  const int ik = g.multi(i)[k];
  const std::size_t s = g.stride(k);
  const std::size_t wrap = static_cast<std::size_t>(g.N - 1) * s;
  AxisNbr nb;
  if (c == Closure::Periodic) {
    nb.lo = ik == 0 ? i + wrap : i - s;
    nb.hi = ik == g.N - 1 ? i - wrap : i + s;
    return nb;
  }
  if (ik == 0) {
    nb.pos = -1;
    nb.hi = i + s;
  } else if (ik == g.N - 1) {
    nb.pos = 1;
    nb.lo = i - s;
  } else {
    nb.lo = i - s;
    nb.hi = i + s;
  }
  return nb;
}

}  // namespace

bool on_boundary(const Grid& g, std::size_t i) {
  const auto m = g.multi(i);
  for (int k = 0; k < g.dim; ++k)
    if (m[k] == 0 || m[k] == g.N - 1) return true;
  return false;
}

double sup_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

Evaluation evaluate(const Grid& g, const HamiltonianSpec& ham, const std::vector<double>& u, SchemeMask& mask,
                    bool update_mask) {
  const std::size_t n = g.size();
  const double h = g.h, rp = ham.rprime, ch = ham.c_h;
  Evaluation ev;
  ev.base.assign(n, 0.0);
  ev.pnorm.assign(n, 0.0);
  ev.drift.grid = g;
  ev.drift.closure = mask.closure;
  for (int k = 0; k < g.dim; ++k) {
    ev.drift.a0[k].assign(n, 0.0);
    ev.drift.am[k].assign(n, 0.0);
    ev.drift.ap[k].assign(n, 0.0);
    if (mask.central[k].size() != n) {
      mask.central[k].assign(n, 0);
      update_mask = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.closure == Closure::Dirichlet && on_boundary(g, i)) {
      ev.base[i] = u[i];
      for (int k = 0; k < g.dim; ++k) mask.central[k][i] = 0;
      continue;
    }
    double dm[2] = {0, 0}, dp[2] = {0, 0}, dc[2] = {0, 0}, lap = 0.0, pc2 = 0.0;
    int pos[2] = {0, 0};
    for (int k = 0; k < g.dim; ++k) {
      const AxisNbr nb = neighbors(g, mask.closure, i, k);
      pos[k] = nb.pos;
      if (nb.pos == 0) {
        dm[k] = (u[i] - u[nb.lo]) / h;
        dp[k] = (u[nb.hi] - u[i]) / h;
        dc[k] = 0.5 * (dm[k] + dp[k]);
        lap += (u[nb.hi] - 2.0 * u[i] + u[nb.lo]) / (h * h);
      } else if (nb.pos < 0) {
        dp[k] = dm[k] = dc[k] = (u[nb.hi] - u[i]) / h;
        lap += u[nb.hi] - u[i];
      } else {
        dp[k] = dm[k] = dc[k] = (u[i] - u[nb.lo]) / h;
        lap += u[nb.lo] - u[i];
      }
      pc2 += dc[k] * dc[k];
    }
    if (update_mask) {
      const double pc = std::sqrt(pc2);
      const double coefc = pc > 0.0 ? ch * rp * std::pow(pc, rp - 2.0) : 0.0;
      for (int k = 0; k < g.dim; ++k)
        mask.central[k][i] = (pos[k] == 0 && std::abs(coefc * dc[k]) * h <= 1.0) ? 1 : 0;
    }
    double p2 = 0.0;
    for (int k = 0; k < g.dim; ++k) {
      if (mask.central[k][i]) {
        p2 += dc[k] * dc[k];
      } else {
        const double gm = pos[k] < 0 ? 0.0 : std::max(dm[k], 0.0);
        const double gp = pos[k] > 0 ? 0.0 : std::min(dp[k], 0.0);
        p2 += gm * gm + gp * gp;
      }
    }
    const double p = std::sqrt(p2);
    const double coef = p > 0.0 ? ch * rp * std::pow(p, rp - 2.0) : 0.0;
    for (int k = 0; k < g.dim; ++k) {
      if (mask.central[k][i]) {
        ev.drift.a0[k][i] = coef * dc[k];
      } else {
        if (pos[k] >= 0) ev.drift.am[k][i] = coef * std::max(dm[k], 0.0);
        if (pos[k] <= 0) ev.drift.ap[k][i] = coef * std::min(dp[k], 0.0);
      }
    }
    ev.pnorm[i] = p;
    ev.base[i] = -lap + ch * std::pow(p, rp);
  }
  return ev;
}

SpMat linearize(const Drift& d) {
  const Grid& g = d.grid;
  const std::size_t n = g.size();
  const double h = g.h, h2 = g.h * g.h;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(n * (1 + 2 * g.dim));
  for (std::size_t i = 0; i < n; ++i) {
    const int row = static_cast<int>(i);
    if (d.closure == Closure::Dirichlet && on_boundary(g, i)) {
      t.emplace_back(row, row, 1.0);
      continue;
    }
    double diag = 0.0;
    for (int k = 0; k < g.dim; ++k) {
      const AxisNbr nb = neighbors(g, d.closure, i, k);
      const double a0 = d.a0[k][i], am = d.am[k][i], ap = d.ap[k][i];
      if (nb.pos == 0) {
        diag += 2.0 / h2 + am / h - ap / h;
        t.emplace_back(row, static_cast<int>(nb.lo), -1.0 / h2 - 0.5 * a0 / h - am / h);
        t.emplace_back(row, static_cast<int>(nb.hi), -1.0 / h2 + 0.5 * a0 / h + ap / h);
      } else if (nb.pos < 0) {
        const double s = a0 + am + ap;
        diag += 1.0 - s / h;
        t.emplace_back(row, static_cast<int>(nb.hi), -1.0 + s / h);
      } else {
        const double s = a0 + am + ap;
        diag += 1.0 + s / h;
        t.emplace_back(row, static_cast<int>(nb.lo), -1.0 - s / h);
      }
    }
    t.emplace_back(row, row, diag);
  }
  SpMat A(static_cast<int>(n), static_cast<int>(n));
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

}  // namespace mfg::detail
