#pragma once

#include <Eigen/Core>
#include <vector>

#include "madot/common.hpp"

namespace madot {

/// Atomic source measure: weighted point masses summing to the target area.
struct DiracMeasure {
  std::vector<Vec2> locations;  ///< the d_k, pairwise distinct
  Eigen::VectorXd weights;      ///< the alpha_k, positive, summing to pi

  int size() const { return static_cast<int>(locations.size()); }
};

/// Throws ContractViolation / DegenerateInputError if the measure is unusable:
/// nonpositive or non-pi-summing weights, duplicate or out-of-square locations.
void validate(const DiracMeasure& mu, double sum_tol = 1e-8);

}  // namespace madot
