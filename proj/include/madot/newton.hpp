#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

#include "madot/scheme.hpp"

namespace madot {

/// Generalized Jacobian of the residual with right-hand side -residual.
struct SparseSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
};

/// Exact derivative of every residual row with the recorded min/max/positive
/// part selections frozen (one element of the generalized Jacobian).
SparseSystem assemble_jacobian(const Eigen::VectorXd& u, const ResidualField& field,
                               const Discretization& disc);

/// Direct sparse solve to relative residual 1e-10 (with refinement); the
/// factorization behind this contract is an implementation detail.
Eigen::VectorXd sparse_solve(const SparseSystem& system);

struct NewtonOptions {
  double tolerance = 1e-8;        ///< on the max-norm of the residual
  int max_iterations = 200;
  int max_backtracks = 30;
  std::uint64_t ordering_seed = 0;  ///< nonzero: solve under a random row permutation
  /// Max-norm line searches can jam on a kink of the piecewise-smooth
  /// residual once the iterate is far below the discretization error. If
  /// backtracking exhausts with the residual under this level, the iterate is
  /// returned (flagged stalled) instead of raising the stagnation error.
  double stall_tolerance = 1e-5;
};

struct SolveReport {
  Eigen::VectorXd u;  ///< shifted solution on the padded grid
  Eigen::VectorXd heights;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;  ///< line search jammed below NewtonOptions::stall_tolerance
  std::vector<double> residual_history;  ///< max-norms, initial value first
  std::vector<double> damping_history;   ///< accepted step length per iteration
  double shift_constant = 0.0;
  double paper_shift_constant = 0.0;  ///< the printed h^2/(h^2-1) variant, for reference
  double wall_time_seconds = 0.0;
};

/// Damped semismooth Newton on the assembled residual. Accepted steps strictly
/// decrease the residual max-norm; the returned potential is shifted to
/// satisfy the mean-constrained equation.
SolveReport newton_solve(const Discretization& disc, const Eigen::VectorXd& initial,
                         const NewtonOptions& opts = {});

/// Cone-min initial guess u0(x) = min_k |x - d_k|.
Eigen::VectorXd default_initialization(const Grid& grid, const DiracMeasure& diracs);

/// Bilinear interpolation of a coarse padded-grid function onto a fine grid,
/// clamped at the coarse extent.
Eigen::VectorXd interpolate_grid_function(const Eigen::VectorXd& coarse_u, const Grid& coarse,
                                          const Grid& fine);

/// Full solve with optional coarse-to-fine continuation: coarser grids are
/// solved first (halved nx, at least 33, Diracs staying on nodes) and the
/// result warm-starts the next level. The report is the finest-level report.
SolveReport solve_pipeline(const DiracMeasure& diracs, const SchemeParams& params,
                           const NewtonOptions& opts = {}, bool continuation = false);

}  // namespace madot
