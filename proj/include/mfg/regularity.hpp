#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mfg/grid.hpp"
#include "mfg/hamiltonian.hpp"

namespace mfg {

// Balls are max-norm node sets; empty centers means every node.
struct MorreyParams {
  double rprime = 2.0;
  double s = 0.0;
  std::vector<double> radii;
  std::vector<std::size_t> centers;
};

struct ProbeSample {
  std::size_t center = 0;
  double radius = 0.0;
  double value = 0.0;
};

struct ProbeStat {
  double q = 0.0;
  double r_hat = 0.0;
  std::vector<ProbeSample> values;
  double sup = 0.0;
};

struct ProbeOptions {
  double margin = -1.0;                 // interior margin; negative means 25% of L
  std::vector<double> radii;            // empty means dyadic L/4, L/8, ..., >= 8h
  std::vector<std::size_t> centers;     // empty means every 4th node inside the margin
  std::optional<double> q;              // required when p >= n
};

double morrey_norm(const ScalarField& field, const MorreyParams& params);

std::vector<double> dyadic_radii(const Grid& g);
std::vector<std::size_t> probe_centers(const Grid& g, double margin);

// K(R) = int_{B_{R/2}} |D_h u|^{r'} / R^{n - r_hat}, r_hat = max(n/p, r).
ProbeStat harnack_stat(const ScalarField& u, const HamiltonianSpec& ham, double p, const ProbeOptions& opt = {});

// sup R^q avg_{B_R} |D_h u|^{r'} dist^{r-q} over balls with B_{2R} inside the domain.
ProbeStat weighted_morrey_stat(const ScalarField& u, const HamiltonianSpec& ham, double p,
                               const ProbeOptions& opt = {});

double weighted_exponent(int n, const HamiltonianSpec& ham, double p, std::optional<double> q = {});

// Seeded fields: Fourier modes with a Gaussian spectrum plus Gaussian bumps (width >= L/10),
// each rescaled to ||f||_p = 1. Resolution independent for a fixed seed.
std::vector<ScalarField> sample_rhs_family(const Grid& g, double p, int count, std::uint64_t seed);

double lp_norm(const ScalarField& f, double p);

}  // namespace mfg
