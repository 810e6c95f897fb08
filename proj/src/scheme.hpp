#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "mfg/hjb.hpp"

namespace mfg::detail {

using SpMat = Eigen::SparseMatrix<double>;

struct Evaluation {
  std::vector<double> base;   // -Delta_h u + H(D_h u)
  std::vector<double> pnorm;  // |D_h u|
  Drift drift;
};

bool on_boundary(const Grid& g, std::size_t i);

// Evaluates the discrete operator; refreshes the mask when update_mask is set.
Evaluation evaluate(const Grid& g, const HamiltonianSpec& ham, const std::vector<double>& u, SchemeMask& mask,
                    bool update_mask);

// Jacobian of u -> -Delta_h u + H(D_h u) at frozen drift.
SpMat linearize(const Drift& drift);

double sup_norm(const std::vector<double>& v);

}  // namespace mfg::detail
