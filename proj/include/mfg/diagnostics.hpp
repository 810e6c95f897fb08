#pragma once

#include <vector>

#include "mfg/ground_state.hpp"
#include "mfg/report.hpp"

namespace mfg {

struct PohozaevResult {
  double res1 = 0.0;
  double res2 = 0.0;
  double res3 = NAN;  // (r'-1) C_H int m |D u|^{r'} against the kinetic term
};

PohozaevResult pohozaev_residuals(const MfgSolution& sol, double alpha, const HamiltonianSpec& ham);
PohozaevResult pohozaev_residuals(const FlowPair& pair, double lambda, double alpha, const HamiltonianSpec& ham,
                                  const ErgodicSolution* u = nullptr);

double mstar_from_gamma(double gamma, int n, double r);
double gamma_from_mstar(double m_star, int n, double r);

struct GammaResult {
  double gamma = 0.0;
  double m_star = 0.0;
  double identity_defect = 0.0;  // |gamma - n/(n+r) M*^{r/n}|
  double ground_mass = 0.0;      // mass of the computed potential-free ground state
  MfgSolution ground;
};

GammaResult gamma_and_mstar(const ProblemSpec& spec, double seed_mass = 1.0);

struct RescaledProfile {
  Grid grid;
  ScalarField m, u;
  VectorField w;
  Point x_eps{0.0, 0.0};
  double eps = 0.0;
};

// Fields at scale eps around x_eps = argmin u, resampled on [-window, window]^n.
RescaledProfile rescaled_profile(const MfgSolution& sol, const HamiltonianSpec& ham, double window = 12.0,
                                 int n_ref = 0);

MuTable mu_weights(const PotentialSpec& potential, const ScalarField& m0);

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

FitResult blowup_fit(const std::vector<DiagnosticsReport>& sweep, double q, double mu, double m_star, int n,
                     double r, double lo = 0.9, double hi = 0.999);

struct ConcentrationPoint {
  double mass_frac = 0.0;
  std::size_t nearest = 0;
  double distance = 0.0;
  double dist_over_eps = 0.0;
  Point offset_over_eps{0.0, 0.0};
  bool in_z0 = false;
};

struct ConcentrationReport {
  std::vector<ConcentrationPoint> points;
  std::vector<std::size_t> admissible;  // Z0
  bool assertable = false;              // false for symmetric degeneracy (|Z0| > 1)
  bool selected = false;                // all points above the threshold sit in Z0 within 4 eps
  std::size_t checked = 0;
  double max_xbar_ratio = 0.0;          // max |x_bar - x_eps| / eps
};

ConcentrationReport concentration_check(const std::vector<DiagnosticsReport>& sweep, const PotentialSpec& potential,
                                        const MuTable& table, double m_star, double frac_threshold = 0.98);

}  // namespace mfg
