#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

namespace madot {

using Vec2 = Eigen::Vector2d;

constexpr double kPi = 3.14159265358979323846;

/// Input violates a documented precondition of an operation.
struct ContractViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Input is structurally unusable (e.g. two identical Diracs at equal height).
struct DegenerateInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Linear or nonlinear solve failed (singular system, stagnation, sweep limit).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StagnationError : SolverError {
  using SolverError::SolverError;
};

inline double pos_part(double x) { return x > 0.0 ? x : 0.0; }
inline double neg_part(double x) { return x < 0.0 ? -x : 0.0; }

// Smoothed positive part and its derivative. eps == 0 gives the exact kink.
inline double pos_part(double x, double eps) {
  if (eps <= 0.0) return pos_part(x);
  return 0.5 * (x + std::sqrt(x * x + eps * eps));
}
inline double dpos_part(double x, double eps) {
  if (eps <= 0.0) return x > 0.0 ? 1.0 : 0.0;
  return 0.5 * (1.0 + x / std::sqrt(x * x + eps * eps));
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

}  // namespace madot
