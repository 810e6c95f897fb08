#pragma once

#include <functional>
#include <vector>

#include "mfg/hjb.hpp"

namespace mfg {

struct FpOptions {
  double regularization = 1e-12;
  int max_iter = 50;
  double tol = 1e-12;  // change between max-normalized iterates
  bool check_kernel = true;
};

// Invariant density of the adjoint of the frozen-drift HJB linearization, mass M.
ScalarField solve_invariant(const Drift& drift, double M, const FpOptions& opt = {});
ScalarField solve_invariant(const Grid& g, const VectorField& drift, double M,
                            Closure closure = Closure::Outflow, const FpOptions& opt = {});

VectorField flux_w(const ScalarField& m, const ErgodicSolution& sol, const HamiltonianSpec& ham);

// A u and A^T m for the frozen-drift operator (A^T built structurally).
std::vector<double> apply_operator(const Drift& drift, const std::vector<double>& u);
std::vector<double> apply_adjoint(const Drift& drift, const std::vector<double>& m);

struct TestFunction {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> grad;

  // (1 - |x-c|^2/R^2)^3 inside the ball.
  static TestFunction bump(const Point& center, double radius);
  // 0.5 * |x - c|^2 (not compactly supported; for fast-decaying m only).
  static TestFunction quadratic(const Point& center);
};

// max over tests of |int grad m . grad phi - int w . grad phi| / ||grad phi||_2.
double fp_weak_residual(const ScalarField& m, const VectorField& w, const std::vector<TestFunction>& tests);

// Centered-difference gradient (one-sided at the walls).
VectorField central_gradient(const ScalarField& f);

}  // namespace mfg
