#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/hamiltonian.hpp"

namespace mfg {

// Outflow: one-sided boundary rows. Periodic: wrap-around test mode.
// Dirichlet: u = 0 on the boundary (lambda-free probe mode).
enum class Closure : std::uint8_t { Outflow = 0, Periodic = 1, Dirichlet = 2 };

// Per node and axis: 1 where the centered gradient is used, 0 where Godunov.
struct SchemeMask {
  Closure closure = Closure::Outflow;
  std::array<std::vector<std::uint8_t>, 2> central;
  bool empty() const { return central[0].empty(); }
};

// Linearized drift b = H'(D_h u), split by the difference it multiplies:
// a0 on the centered difference, am on D-, ap on D+.
struct Drift {
  Grid grid;
  Closure closure = Closure::Outflow;
  std::array<std::vector<double>, 2> a0, am, ap;

  VectorField vector() const;
};

// Centered where |b|h <= 1, upwind by sign elsewhere, outflow-only at walls.
Drift split_drift(const VectorField& b, Closure closure = Closure::Outflow);

struct ErgodicSolution {
  ScalarField u;
  double lambda = 0.0;
  std::string normalization = "min-zero";
  double residual_norm = 0.0;
  int iterations = 0;
  SchemeMask mask;
};

struct HjbOptions {
  double tol = 1e-8;
  int max_iter = 60;
  int mask_updates = 5;  // Newton steps before the scheme mask is frozen
  Closure closure = Closure::Outflow;
};

ErgodicSolution solve_ergodic(const Grid& g, const ScalarField& f, const HamiltonianSpec& ham,
                              const HjbOptions& opt = {}, const ErgodicSolution* init = nullptr);

ErgodicSolution solve_ergodic(const Grid& g, const ScalarField& f, const HamiltonianSpec& ham, double tol,
                              int max_iter);

// -Delta u + C_H |D u|^{r'} = f with u = 0 on the boundary (no lambda).
ErgodicSolution solve_dirichlet(const Grid& g, const ScalarField& f, const HamiltonianSpec& ham,
                                const HjbOptions& opt = {});

ScalarField hjb_residual(const ErgodicSolution& sol, const ScalarField& f, const HamiltonianSpec& ham);

VectorField drift_from_u(const ErgodicSolution& sol, const HamiltonianSpec& ham);
Drift drift_split(const ErgodicSolution& sol, const HamiltonianSpec& ham);

// Scheme gradient |D_h u| node-wise (same upwinding as the solver).
std::vector<double> scheme_gradient_norm(const ErgodicSolution& sol, const HamiltonianSpec& ham);

struct GradientBoundReport {
  double constant = 0.0;  // smallest C with |D_h u| <= C (1+V)^{1/r'}
  std::size_t node = 0;
};

GradientBoundReport gradient_bound_check(const ErgodicSolution& sol, const ScalarField& V,
                                         const HamiltonianSpec& ham);

// Ratio of largest to smallest constant over a refinement sequence.
double gradient_bound_growth(const std::vector<GradientBoundReport>& reports);

}  // namespace mfg
