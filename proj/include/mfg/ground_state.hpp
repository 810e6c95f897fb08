#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mfg/energy.hpp"
#include "mfg/hjb.hpp"
#include "mfg/problem.hpp"
#include "mfg/report.hpp"

namespace mfg {

struct MfgSolution {
  FlowPair pair;
  ErgodicSolution u;
  double lambda = 0.0;
  double energy = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // HJB sup-residual + fixed-point defect + relative mass error
  std::vector<double> history;
  bool potential_free = false;
  double alpha = 0.0;
  HamiltonianSpec ham;
  double coupling = 1.0;  // kappa of the gauge solve; 1 for fixed-mass solves

  const Grid& grid() const { return pair.grid(); }
  double mass() const { return pair.mass(); }
};

MfgSolution solve_mfg(const ProblemSpec& spec, double M, const std::optional<FlowPair>& init = std::nullopt);

// V = 0 ground state with centroid pinning. At the critical exponent the
// ergodic constant is held at the gauge and the mass M* is an output; M is a seed.
MfgSolution potential_free_ground(const ProblemSpec& spec, double M);

struct SweepEntry {
  MfgSolution solution;
  DiagnosticsReport report;
  std::size_t branch = 0;
};

struct SweepOptions {
  // One branch per declared well (initial bump at the well), lowest energy kept per mass.
  bool multistart = false;
  std::optional<FlowPair> init;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  bool aborted = false;
  std::size_t abort_index = 0;
  std::string abort_reason;
};

SweepResult continuation_sweep(const ProblemSpec& spec, const std::vector<double>& masses,
                               const SweepOptions& opt = {});

struct NlsResult {
  FlowPair pair;
  std::vector<double> v;
  double lambda = 0.0;           // Rayleigh-quotient value of the converged profile
  double lambda_target = 0.0;    // fixed gauge when the mass is an output
  double mass = 0.0;
  double mu = 0.0;
  int iterations = 0;
  bool fixed_lambda = false;
};

NlsResult nls_oracle(const ProblemSpec& spec, double M);

// Basic per-solution diagnostics (no Pohozaev unless potential free).
DiagnosticsReport make_report(const MfgSolution& sol);

// Resample m onto itself shifted so that its centroid sits at the origin; mass preserved.
std::vector<double> center_density(const Grid& g, const std::vector<double>& m);
Point centroid(const Grid& g, const std::vector<double>& m);

}  // namespace mfg
