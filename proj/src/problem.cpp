#include "mfg/problem.hpp"

#include <cmath>

#include "mfg/error.hpp"

namespace mfg {

// Decay rate b = 36/L keeps the density below e^{-36} at the walls; the
// matching ergodic constant follows from the far-field balance C_H|u'|^{r'} = -lambda.
double ProblemSpec::default_gauge() const {
  const double b = 36.0 / L;
  return -ham.c_h * std::pow(b / (ham.c_h * ham.rprime), ham.r());
}

void ProblemSpec::validate() const {
  make_grid(dim, L, N);
  HamiltonianSpec::make(ham.rprime, ham.c_h);
  if (!alpha_critical && !(alpha_value > 0.0)) throw ConfigError("alpha must be positive or 'critical'");
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  potential.validate();
  if (!(tol.hjb > 0.0) || !(tol.fp > 0.0) || !(tol.fixpoint > 0.0)) throw ConfigError("tolerances must be positive");
  if (tol.max_iter < 1 || tol.hjb_max_iter < 1) throw ConfigError("iteration caps must be positive");
  if (!(damping > 0.0) || damping > 1.0) throw ConfigError("damping must lie in (0, 1]");
  if (moll_radius && !(*moll_radius > 0.0)) throw ConfigError("moll_radius must be positive");
  if (lambda_gauge && !(*lambda_gauge < 0.0)) throw ConfigError("ground.lambda must be negative");
  if (!(density_cap > 0.0)) throw ConfigError("density cap must be positive");
}

}  // namespace mfg
