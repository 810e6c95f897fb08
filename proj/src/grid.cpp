#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>

#include "mfg/error.hpp"

namespace mfg {

Grid make_grid(int dim, double L, int N) {
  if (dim != 1 && dim != 2) throw ConfigError("grid dimension must be 1 or 2");
  if (N < 16) throw ConfigError("grid needs at least 16 points per axis");
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("domain half-width must be positive");
  Grid g;
  g.dim = dim;
  g.L = L;
  g.N = N;
  g.h = (2.0 * L) / (N - 1);
  return g;
}

std::size_t Grid::size() const {
  return dim == 1 ? static_cast<std::size_t>(N) : static_cast<std::size_t>(N) * N;
}

// Symmetric in i <-> N-1-i so that even fields stay exactly even.
double Grid::coord(int i) const { return L * (2.0 * i - (N - 1)) / (N - 1); }

std::size_t Grid::stride(int axis) const {
  return (dim == 2 && axis == 0) ? static_cast<std::size_t>(N) : 1;
}

std::array<int, 2> Grid::multi(std::size_t idx) const {
  if (dim == 1) return {static_cast<int>(idx), 0};
  return {static_cast<int>(idx / N), static_cast<int>(idx % N)};
}

std::size_t Grid::index(int i0, int i1) const {
  return dim == 1 ? static_cast<std::size_t>(i0) : static_cast<std::size_t>(i0) * N + i1;
}

Point Grid::point(std::size_t idx) const {
  auto m = multi(idx);
  return {coord(m[0]), dim == 2 ? coord(m[1]) : 0.0};
}

double Grid::cell_volume() const { return dim == 1 ? h : h * h; }

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
  if (v_.size() != grid_.size()) throw NumericError("scalar field size does not match grid");
  for (double x : v_)
    if (!std::isfinite(x)) throw NumericError("scalar field has a non-finite value");
}

ScalarField ScalarField::constant(const Grid& g, double c) {
  return ScalarField(g, std::vector<double>(g.size(), c));
}

ScalarField ScalarField::from_function(const Grid& g, const std::function<double(const Point&)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.point(i));
  return ScalarField(g, std::move(v));
}

double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }
double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }

VectorField::VectorField(const Grid& g, std::array<std::vector<double>, 2> comps)
    : grid_(g), c_(std::move(comps)) {
  for (int k = 0; k < g.dim; ++k) {
    if (c_[k].size() != g.size()) throw NumericError("vector field size does not match grid");
    for (double x : c_[k])
      if (!std::isfinite(x)) throw NumericError("vector field has a non-finite value");
  }
  if (g.dim == 1) c_[1].clear();
}

VectorField VectorField::zeros(const Grid& g) {
  std::array<std::vector<double>, 2> c;
  for (int k = 0; k < g.dim; ++k) c[k].assign(g.size(), 0.0);
  return VectorField(g, std::move(c));
}

double VectorField::norm_at(std::size_t i) const {
  double s = 0.0;
  for (int k = 0; k < grid_.dim; ++k) s += c_[k][i] * c_[k][i];
  return std::sqrt(s);
}

std::vector<double> quadrature_weights(const Grid& g) {
  std::vector<double> w1(g.N, g.h);
  w1.front() = w1.back() = 0.5 * g.h;
  if (g.dim == 1) return w1;
  std::vector<double> w(g.size());
  for (int i = 0; i < g.N; ++i)
    for (int j = 0; j < g.N; ++j) w[g.index(i, j)] = w1[i] * w1[j];
  return w;
}

double integrate(const Grid& g, const std::vector<double>& v) {
  const auto w = quadrature_weights(g);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i];
  return s;
}

double integrate(const ScalarField& f) { return integrate(f.grid(), f.values()); }

namespace {

// Cell index and local coordinate along one axis; false if outside.
bool locate(const Grid& g, double x, bool clamp, int& i, double& t) {
  double s = (x + g.L) / g.h;
  if (s < 0.0 || s > g.N - 1) {
    if (!clamp) return false;
    s = std::clamp(s, 0.0, static_cast<double>(g.N - 1));
  }
  i = std::min(static_cast<int>(std::floor(s)), g.N - 2);
  t = s - i;
  return true;
}

}  // namespace

double interpolate(const Grid& g, const std::vector<double>& v, const Point& x, bool clamp) {
  int i, j = 0;
  double t, s = 0.0;
  if (!locate(g, x[0], clamp, i, t)) return 0.0;
  if (g.dim == 1) return (1 - t) * v[i] + t * v[i + 1];
  if (!locate(g, x[1], clamp, j, s)) return 0.0;
  return (1 - t) * (1 - s) * v[g.index(i, j)] + t * (1 - s) * v[g.index(i + 1, j)] +
         (1 - t) * s * v[g.index(i, j + 1)] + t * s * v[g.index(i + 1, j + 1)];
}

std::size_t argmin_node(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

std::size_t argmax_node(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace mfg
