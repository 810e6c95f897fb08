#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mfg/grid.hpp"
#include "mfg/hamiltonian.hpp"
#include "mfg/potential.hpp"

namespace mfg {

struct Tolerances {
  double hjb = 1e-10;
  double fp = 1e-12;
  double fixpoint = 1e-9;
  int max_iter = 6000;
  int hjb_max_iter = 60;
};

struct ProblemSpec {
  int dim = 1;
  HamiltonianSpec ham;
  bool alpha_critical = true;
  double alpha_value = 0.0;
  double mass = 1.0;
  double L = 8.0;
  int N = 1025;
  PotentialSpec potential;
  Tolerances tol;
  double damping = 0.5;
  std::optional<double> moll_radius;
  std::uint64_t seed = 1;
  std::string out_dir;
  // Ergodic constant fixed by potential_free_ground in the critical case.
  std::optional<double> lambda_gauge;
  double density_cap = 1e8;

  double alpha() const { return alpha_critical ? ham.r() / dim : alpha_value; }
  Grid grid() const { return make_grid(dim, L, N); }
  double default_gauge() const;
  void validate() const;
};

}  // namespace mfg
