#include "mfg/energy.hpp"

#include <cmath>
#include <limits>

#include "mfg/error.hpp"
#include "mfg/fokker_planck.hpp"

namespace mfg {

FlowPair::FlowPair(ScalarField m, VectorField w) : m_(std::move(m)), w_(std::move(w)) {
  if (w_.grid() != m_.grid()) throw ConfigError("density and flux on different grids");
  for (double x : m_.values())
    if (x < 0.0) throw NumericError("density must be nonnegative");
  mass_ = integrate(m_);
  if (!(mass_ > 0.0)) throw NumericError("density must have positive mass");
  for (std::size_t i = 0; i < m_.size() && feasible_; ++i)
    if (m_[i] == 0.0 && w_.norm_at(i) != 0.0) feasible_ = false;
}

FlowPair gradient_pair(const ScalarField& m) { return FlowPair(m, central_gradient(m)); }

FlowPair dilate_pair(const FlowPair& p, double t, const Point& c) {
  const Grid& g = p.grid();
  const int n = g.dim;
  std::vector<double> m(g.size());
  std::array<std::vector<double>, 2> w;
  for (int k = 0; k < n; ++k) w[k].resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.point(i);
    const Point y{t * (x[0] - c[0]) + c[0], n == 2 ? t * (x[1] - c[1]) + c[1] : 0.0};
    m[i] = std::pow(t, n) * interpolate(g, p.m().values(), y);
    for (int k = 0; k < n; ++k) w[k][i] = std::pow(t, n + 1) * interpolate(g, p.w().component(k), y);
  }
  return FlowPair(ScalarField(g, std::move(m)), VectorField(g, std::move(w)));
}

FlowPair shift_pair(const FlowPair& p, int s0, int s1) {
  const Grid& g = p.grid();
  auto wrap = [&](int i) { return ((i % g.N) + g.N) % g.N; };
  std::vector<double> m(g.size());
  std::array<std::vector<double>, 2> w;
  for (int k = 0; k < g.dim; ++k) w[k].resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto mi = g.multi(i);
    const std::size_t j = g.dim == 1 ? g.index(wrap(mi[0] - s0)) : g.index(wrap(mi[0] - s0), wrap(mi[1] - s1));
    m[i] = p.m()[j];
    for (int k = 0; k < g.dim; ++k) w[k][i] = p.w().component(k)[j];
  }
  return FlowPair(ScalarField(g, std::move(m)), VectorField(g, std::move(w)));
}

double kinetic(const FlowPair& p, const HamiltonianSpec& ham) {
  if (!p.feasible()) return std::numeric_limits<double>::infinity();
  const Grid& g = p.grid();
  const auto q = quadrature_weights(g);
  const double r = ham.r();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double wn = p.w().norm_at(i);
    if (wn == 0.0) continue;
    s += q[i] * std::pow(wn, r) * std::pow(p.m()[i], 1.0 - r);
  }
  return ham.c_l() * s;
}

double coupling_integral(const FlowPair& p, double alpha) {
  std::vector<double> v(p.m().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(p.m()[i], alpha + 1.0);
  return integrate(p.grid(), v);
}

double potential_integral(const FlowPair& p, const ScalarField& V) {
  std::vector<double> v(p.m().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = V[i] * p.m()[i];
  return integrate(p.grid(), v);
}

double total_energy(const FlowPair& p, const ScalarField& V, double alpha, const HamiltonianSpec& ham) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  return kinetic(p, ham) + potential_integral(p, V) - coupling_integral(p, alpha) / (alpha + 1.0);
}

double gn_ratio(const FlowPair& p, double alpha, const HamiltonianSpec& ham) {
  const double den = coupling_integral(p, alpha);
  if (!(den > 0.0)) throw DegenerateError("GN ratio has a zero denominator");
  const double n = p.grid().dim, r = ham.r();
  return std::pow(kinetic(p, ham), n * alpha / r) * std::pow(p.mass(), ((alpha + 1.0) * r - n * alpha) / r) / den;
}

double mollified_coupling(const FlowPair& p, double alpha, double eps, bool periodic) {
  const Grid& g = p.grid();
  if (!(eps >= 2.0 * g.h * (1.0 - 1e-12))) throw ConfigError("mollifier radius must be at least 2h");
  const int reach = static_cast<int>(std::floor(eps / g.h));
  struct Tap {
    int d0, d1;
    double w;
  };
  std::vector<Tap> taps;
  double sum = 0.0;
  const int r1 = g.dim == 2 ? reach : 0;
  for (int a = -reach; a <= reach; ++a)
    for (int b = -r1; b <= r1; ++b) {
      const double s = (a * a + b * b) * g.h * g.h / (eps * eps);
      if (s >= 1.0) continue;
      const double w = (1.0 - s) * (1.0 - s);
      taps.push_back({a, b, w});
      sum += w;
    }
  for (auto& t : taps) t.w /= sum;  // discrete weights sum to one
  const auto& m = p.m().values();
  std::vector<double> c(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto mi = g.multi(i);
    double acc = 0.0;
    for (const auto& t : taps) {
      int j0 = mi[0] - t.d0, j1 = mi[1] - t.d1;
      if (periodic) {
        j0 = ((j0 % g.N) + g.N) % g.N;
        if (g.dim == 2) j1 = ((j1 % g.N) + g.N) % g.N;
      } else if (j0 < 0 || j0 >= g.N || (g.dim == 2 && (j1 < 0 || j1 >= g.N))) {
        continue;
      }
      acc += t.w * m[g.index(j0, j1)];
    }
    c[i] = std::pow(acc, alpha + 1.0);
  }
  return integrate(g, c);
}

double mollified_energy(const FlowPair& p, const ScalarField& V, double alpha, const HamiltonianSpec& ham,
                        double eps, bool periodic) {
  return kinetic(p, ham) + potential_integral(p, V) - mollified_coupling(p, alpha, eps, periodic) / (alpha + 1.0);
}

double gn_inequality_rhs(const FlowPair& p, const HamiltonianSpec& ham, double m_star) {
  const double n = p.grid().dim, r = ham.r();
  return (1.0 + r / n) * std::pow(m_star, -r / n) * kinetic(p, ham) * std::pow(p.mass(), r / n);
}

double gn_inequality_check(const FlowPair& p, const HamiltonianSpec& ham, double m_star) {
  const double n = p.grid().dim, r = ham.r();
  return gn_inequality_rhs(p, ham, m_star) - coupling_integral(p, r / n);
}

}  // namespace mfg
