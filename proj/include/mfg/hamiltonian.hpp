#pragma once

#include <span>
#include <vector>

namespace mfg {

// H(p) = C_H |p|^{r'} and its Legendre dual C_L |q|^r.
struct HamiltonianSpec {
  double rprime = 2.0;
  double c_h = 1.0;

  static HamiltonianSpec make(double rprime, double c_h);
  double r() const { return rprime / (rprime - 1.0); }
  double c_l() const;
};

double h_value(std::span<const double> p, const HamiltonianSpec& ham);
std::vector<double> h_grad(std::span<const double> p, const HamiltonianSpec& ham);
double lagrangian(std::span<const double> q, const HamiltonianSpec& ham);

}  // namespace mfg
