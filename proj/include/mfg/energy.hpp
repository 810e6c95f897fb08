#pragma once

#include "mfg/grid.hpp"
#include "mfg/hamiltonian.hpp"

namespace mfg {

// Density-flux pair. Infeasible (kinetic = +inf) when m = 0 and w != 0 somewhere.
class FlowPair {
 public:
  FlowPair() = default;
  FlowPair(ScalarField m, VectorField w);

  const ScalarField& m() const { return m_; }
  const VectorField& w() const { return w_; }
  const Grid& grid() const { return m_.grid(); }
  double mass() const { return mass_; }
  bool feasible() const { return feasible_; }

 private:
  ScalarField m_;
  VectorField w_;
  double mass_ = 0.0;
  bool feasible_ = true;
};

// (m, grad m) with the centered gradient.
FlowPair gradient_pair(const ScalarField& m);

// (t^n m(t(x-c)+c'), t^{n+1} w(...)) resampled onto the same grid; c = centre of dilation.
FlowPair dilate_pair(const FlowPair& p, double t, const Point& center = {0.0, 0.0});
// Whole-grid periodic shift by integer node offsets.
FlowPair shift_pair(const FlowPair& p, int s0, int s1 = 0);

double kinetic(const FlowPair& p, const HamiltonianSpec& ham);
double coupling_integral(const FlowPair& p, double alpha);  // int m^{alpha+1}
double potential_integral(const FlowPair& p, const ScalarField& V);
double total_energy(const FlowPair& p, const ScalarField& V, double alpha, const HamiltonianSpec& ham);
double gn_ratio(const FlowPair& p, double alpha, const HamiltonianSpec& ham);

// Coupling term evaluated on eta_eps * m; periodic wraps the convolution.
double mollified_coupling(const FlowPair& p, double alpha, double eps, bool periodic = false);
double mollified_energy(const FlowPair& p, const ScalarField& V, double alpha, const HamiltonianSpec& ham,
                        double eps, bool periodic = false);

// RHS - LHS of int m^{1+r/n} <= (1+r/n) (M*)^{-r/n} kinetic (int m)^{r/n}.
double gn_inequality_check(const FlowPair& p, const HamiltonianSpec& ham, double m_star);
double gn_inequality_rhs(const FlowPair& p, const HamiltonianSpec& ham, double m_star);

}  // namespace mfg
