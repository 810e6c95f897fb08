#include "mfg/hamiltonian.hpp"

#include <cmath>

#include "mfg/error.hpp"

namespace mfg {

namespace {

double norm(std::span<const double> p) {
  double s = 0.0;
  for (double x : p) s += x * x;
  return std::sqrt(s);
}

}  // namespace

HamiltonianSpec HamiltonianSpec::make(double rprime, double c_h) {
  if (!(rprime > 1.0) || !std::isfinite(rprime)) throw ConfigError("rprime must exceed 1");
  if (!(c_h > 0.0) || !std::isfinite(c_h)) throw ConfigError("c_h must be positive");
  return HamiltonianSpec{rprime, c_h};
}

double HamiltonianSpec::c_l() const {
  return (1.0 / r()) * std::pow(rprime * c_h, 1.0 / (1.0 - rprime));
}

double h_value(std::span<const double> p, const HamiltonianSpec& ham) {
  return ham.c_h * std::pow(norm(p), ham.rprime);
}

std::vector<double> h_grad(std::span<const double> p, const HamiltonianSpec& ham) {
  std::vector<double> g(p.size(), 0.0);
  const double n = norm(p);
  if (n == 0.0) return g;
  const double c = ham.c_h * ham.rprime * std::pow(n, ham.rprime - 2.0);
  for (std::size_t k = 0; k < p.size(); ++k) g[k] = c * p[k];
  return g;
}

double lagrangian(std::span<const double> q, const HamiltonianSpec& ham) {
  return ham.c_l() * std::pow(norm(q), ham.r());
}

}  // namespace mfg
