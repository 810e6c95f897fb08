#include "mfg/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mfg/error.hpp"
#include "mfg/fokker_planck.hpp"

namespace mfg {

namespace {

// Prefix sums for O(1) sums over index boxes.
class BoxSum {
 public:
  BoxSum(const Grid& g, const std::vector<double>& v) : g_(g) {
    const std::size_t n0 = g.N + 1, n1 = g.dim == 2 ? g.N + 1 : 2;
    n1_ = n1;
    s_.assign(n0 * n1, 0.0);
    for (int i = 0; i < g.N; ++i)
      for (int j = 0; j < (g.dim == 2 ? g.N : 1); ++j)
        at(i + 1, j + 1) = v[g.index(i, j)] + at(i, j + 1) + at(i + 1, j) - at(i, j);
  }

  // Sum over nodes with index in [lo, hi] per axis (clipped to the grid) and the node count.
  std::pair<double, std::size_t> sum(std::array<int, 2> c, int w) const {
    const int a0 = std::max(c[0] - w, 0), b0 = std::min(c[0] + w, g_.N - 1);
    int a1 = 0, b1 = 0;
    if (g_.dim == 2) {
      a1 = std::max(c[1] - w, 0);
      b1 = std::min(c[1] + w, g_.N - 1);
    }
    const double s = get(b0 + 1, b1 + 1) - get(a0, b1 + 1) - get(b0 + 1, a1) + get(a0, a1);
    return {s, static_cast<std::size_t>(b0 - a0 + 1) * static_cast<std::size_t>(b1 - a1 + 1)};
  }

 private:
  double& at(std::size_t i, std::size_t j) { return s_[i * n1_ + j]; }
  double get(std::size_t i, std::size_t j) const { return s_[i * n1_ + j]; }
  const Grid& g_;
  std::size_t n1_ = 0;
  std::vector<double> s_;
};

int half_width(const Grid& g, double R) { return static_cast<int>(std::floor(R / g.h + 1e-9)); }

double boundary_distance(const Grid& g, std::size_t i) {
  const Point x = g.point(i);
  double d = g.L - std::abs(x[0]);
  if (g.dim == 2) d = std::min(d, g.L - std::abs(x[1]));
  return d;
}

std::vector<double> grad_power(const ScalarField& u, double rprime) {
  const Grid& g = u.grid();
  const VectorField du = central_gradient(u);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::pow(du.norm_at(i), rprime);
  return out;
}

double margin_of(const Grid& g, const ProbeOptions& opt) { return opt.margin < 0.0 ? 0.25 * g.L : opt.margin; }

// Portable uniform in [0, 1) from a 64-bit engine.
double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform(rng), u2 = uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace

double morrey_norm(const ScalarField& field, const MorreyParams& params) {
  const Grid& g = field.grid();
  if (params.s < 0.0 || params.s > g.dim) throw ConfigError("Morrey exponent s must lie in [0, n]");
  for (double R : params.radii)
    if (!(R > 0.0) || R > 2.0 * g.L) throw ConfigError("Morrey radii must lie in (0, 2L]");
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(std::abs(field[i]), params.rprime);
  const BoxSum box(g, v);
  std::vector<std::size_t> centers = params.centers;
  if (centers.empty())
    for (std::size_t i = 0; i < g.size(); ++i) centers.push_back(i);
  double best = 0.0;
  for (double R : params.radii) {
    const int w = half_width(g, R);
    const double scale = std::pow(R, params.s);
    for (std::size_t c : centers) {
      const auto [s, count] = box.sum(g.multi(c), w);
      if (count < 4) continue;
      best = std::max(best, scale * s / static_cast<double>(count));
    }
  }
  return std::pow(best, 1.0 / params.rprime);
}

std::vector<double> dyadic_radii(const Grid& g) {
  std::vector<double> r;
  for (double R = g.L / 4.0; R >= 8.0 * g.h * (1.0 - 1e-12); R *= 0.5) r.push_back(R);
  return r;
}

std::vector<std::size_t> probe_centers(const Grid& g, double margin) {
  std::vector<std::size_t> c;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto m = g.multi(i);
    if (m[0] % 4 != 0 || (g.dim == 2 && m[1] % 4 != 0)) continue;
    if (boundary_distance(g, i) >= margin - 1e-12) c.push_back(i);
  }
  return c;
}

double weighted_exponent(int n, const HamiltonianSpec& ham, double p, std::optional<double> q) {
  if (!(p > n / ham.r())) throw ConfigError("weighted Morrey probe needs p > n/r");
  if (n >= 2 && ham.rprime < static_cast<double>(n) / (n - 1))
    throw ConfigError("weighted Morrey probe needs r' >= n/(n-1)");
  double qq;
  if (p < n) {
    qq = ham.rprime * (n / p - 1.0);
  } else {
    if (!q || !(*q > 0.0) || !(*q < ham.r())) throw ConfigError("for p >= n the exponent q must be set in (0, r)");
    qq = *q;
  }
  if (!(qq > 0.0) || qq > n) throw ConfigError("weighted exponent q out of (0, n]");
  return qq;
}

ProbeStat harnack_stat(const ScalarField& u, const HamiltonianSpec& ham, double p, const ProbeOptions& opt) {
  const Grid& g = u.grid();
  const int n = g.dim;
  ProbeStat st;
  st.r_hat = std::max(n / p, ham.r());
  if (p < n) st.q = ham.rprime * (n / p - 1.0);
  const BoxSum box(g, grad_power(u, ham.rprime));
  const auto radii = opt.radii.empty() ? dyadic_radii(g) : opt.radii;
  const auto centers = opt.centers.empty() ? probe_centers(g, margin_of(g, opt)) : opt.centers;
  const double cell = std::pow(g.h, n);
  for (double R : radii) {
    const int w = half_width(g, 0.5 * R);
    const double denom = std::pow(R, n - st.r_hat);
    for (std::size_t c : centers) {
      if (R > boundary_distance(g, c) + 1e-12) continue;
      const double K = cell * box.sum(g.multi(c), w).first / denom;
      st.values.push_back({c, R, K});
      st.sup = std::max(st.sup, K);
    }
  }
  return st;
}

ProbeStat weighted_morrey_stat(const ScalarField& u, const HamiltonianSpec& ham, double p, const ProbeOptions& opt) {
  const Grid& g = u.grid();
  const int n = g.dim;
  ProbeStat st;
  st.q = weighted_exponent(n, ham, p, opt.q);
  st.r_hat = std::max(n / p, ham.r());
  const BoxSum box(g, grad_power(u, ham.rprime));
  const auto radii = opt.radii.empty() ? dyadic_radii(g) : opt.radii;
  const auto centers = opt.centers.empty() ? probe_centers(g, margin_of(g, opt)) : opt.centers;
  for (double R : radii) {
    const int w = half_width(g, R);
    const double rq = std::pow(R, st.q);
    for (std::size_t c : centers) {
      const double dist = boundary_distance(g, c);
      if (2.0 * R > dist + 1e-12) continue;
      const auto [s, count] = box.sum(g.multi(c), w);
      const double val = rq * s / static_cast<double>(count) * std::pow(dist, ham.r() - st.q);
      st.values.push_back({c, R, val});
      st.sup = std::max(st.sup, val);
    }
  }
  return st;
}

double lp_norm(const ScalarField& f, double p) {
  std::vector<double> v(f.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(std::abs(f[i]), p);
  return std::pow(integrate(f.grid(), v), 1.0 / p);
}

std::vector<ScalarField> sample_rhs_family(const Grid& g, double p, int count, std::uint64_t seed) {
  if (count < 0) throw ConfigError("family size must be non-negative");
  if (!(p >= 1.0)) throw ConfigError("p must be at least 1");
  constexpr int kModes = 8, kBumps = 3;
  std::mt19937_64 rng(seed);
  std::vector<ScalarField> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    struct Mode { double a, w0, w1, phase; };
    struct Bump { double c, x0, x1, width; };
    std::vector<Mode> modes(kModes);
    std::vector<Bump> bumps(kBumps);
    for (auto& m : modes) {
      m.a = normal(rng) / std::sqrt(double(kModes));
      m.w0 = 3.0 * normal(rng) * M_PI / g.L;
      m.w1 = g.dim == 2 ? 3.0 * normal(rng) * M_PI / g.L : 0.0;
      m.phase = 2.0 * M_PI * uniform(rng);
    }
    for (auto& b : bumps) {
      b.c = 2.0 * normal(rng);
      b.x0 = g.L * (1.5 * uniform(rng) - 0.75);
      b.x1 = g.dim == 2 ? g.L * (1.5 * uniform(rng) - 0.75) : 0.0;
      b.width = g.L * (0.1 + 0.2 * uniform(rng));
    }
    ScalarField f = ScalarField::from_function(g, [&](const Point& x) {
      double v = 0.0;
      for (const auto& m : modes) v += m.a * std::cos(m.w0 * x[0] + m.w1 * x[1] + m.phase);
      for (const auto& b : bumps) {
        const double d2 = (x[0] - b.x0) * (x[0] - b.x0) + (x[1] - b.x1) * (x[1] - b.x1);
        v += b.c * std::exp(-0.5 * d2 / (b.width * b.width));
      }
      return v;
    });
    const double nrm = lp_norm(f, p);
    if (!(nrm > 0.0)) throw NumericError("degenerate sample in the right-hand-side family");
    std::vector<double> v = f.values();
    for (double& x : v) x /= nrm;
    out.emplace_back(g, std::move(v));
  }
  return out;
}

}  // namespace mfg
