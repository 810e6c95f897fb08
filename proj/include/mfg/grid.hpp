#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace mfg {

using Point = std::array<double, 2>;

// Uniform tensor grid on [-L, L]^dim. Node index is x-major: idx = ix*N + iy.
struct Grid {
  int dim = 1;
  double L = 1.0;
  int N = 16;
  double h = 0.0;

  std::size_t size() const;
  double coord(int i) const;
  std::size_t stride(int axis) const;
  std::array<int, 2> multi(std::size_t idx) const;
  std::size_t index(int i0, int i1 = 0) const;
  Point point(std::size_t idx) const;
  double cell_volume() const;

  bool operator==(const Grid& o) const { return dim == o.dim && L == o.L && N == o.N; }
  bool operator!=(const Grid& o) const { return !(*this == o); }
};

Grid make_grid(int dim, double L, int N);

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(const Grid& g, std::vector<double> values);

  static ScalarField constant(const Grid& g, double c);
  static ScalarField from_function(const Grid& g, const std::function<double(const Point&)>& f);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return v_; }
  double operator[](std::size_t i) const { return v_[i]; }
  std::size_t size() const { return v_.size(); }
  double max() const;
  double min() const;

 private:
  Grid grid_;
  std::vector<double> v_;
};

class VectorField {
 public:
  VectorField() = default;
  VectorField(const Grid& g, std::array<std::vector<double>, 2> comps);

  static VectorField zeros(const Grid& g);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& component(int axis) const { return c_[axis]; }
  double norm_at(std::size_t i) const;

 private:
  Grid grid_;
  std::array<std::vector<double>, 2> c_;
};

// Composite trapezoid weights (tensor product).
std::vector<double> quadrature_weights(const Grid& g);
double integrate(const ScalarField& f);
double integrate(const Grid& g, const std::vector<double>& v);

// Multilinear interpolation; zero outside the box unless clamp is set.
double interpolate(const Grid& g, const std::vector<double>& v, const Point& x, bool clamp = false);

// Lexicographically smallest node attaining the min / max.
std::size_t argmin_node(const std::vector<double>& v);
std::size_t argmax_node(const std::vector<double>& v);

}  // namespace mfg
