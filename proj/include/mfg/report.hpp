#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

struct MuEntry {
  Point center{0.0, 0.0};
  double a = 0.0;
  double q = 0.0;
  Point y{0.0, 0.0};  // minimizer of H_i
  double mu = 0.0;    // min H_i
  bool flattest = false;
  bool in_z0 = false;
};

struct MuTable {
  std::vector<MuEntry> wells;
  double q_max = 0.0;
  double mu = 0.0;  // min over the flattest wells
  std::vector<std::size_t> Z, Z0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double prefactor() const { return std::exp(intercept); }
};

struct FitResult {
  std::size_t points = 0;
  LineFit eps, energy;
  double eps_slope_pred = 0.0, eps_prefactor_pred = 0.0;
  double energy_slope_pred = 0.0, energy_prefactor_pred = 0.0;
  std::vector<double> mass_frac, delta, epsilon, energy_values, eps_ratio, energy_ratio;
  double m_star_extrapolated = 0.0;
};

struct DiagnosticsReport {
  double mass = 0.0;
  double pohozaev_res1 = NAN;
  double pohozaev_res2 = NAN;
  double pohozaev_res3 = NAN;
  double kinetic = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;   // GN ratio of this pair at the critical exponent
  double m_star = 0.0;  // [(1+r/n) gamma]^{n/r}
  double lambda = 0.0;
  double energy = 0.0;
  double coupling = 0.0;             // int m^{alpha+1}
  double fp_constant = 0.0;          // int m^{1+alpha} / (M^{..} (kinetic/C_L)^{n alpha/r})
  Point x_eps{0.0, 0.0};             // argmin u
  Point x_bar{0.0, 0.0};             // argmax m
  std::optional<MuTable> mu_table;
  std::optional<FitResult> fit;
};

}  // namespace mfg
