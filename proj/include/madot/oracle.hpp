#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "madot/geometry.hpp"
#include "madot/newton.hpp"

namespace madot {

/// Heights with every Laguerre cell carrying its prescribed area, found by
/// sequential lifting: raising a plane shrinks its own cell and grows the
/// others, so each height is a 1-D monotone root-find.
struct OracleResult {
  Eigen::VectorXd heights;      ///< normalized to min 0
  Eigen::VectorXd area_errors;  ///< per cell: area_k - alpha_k
  int sweeps = 0;
  double max_area_error = 0.0;
  bool mc_check_passed = true;  ///< Monte Carlo spot check on 3 random cells
};

OracleResult pogorelov_solve(const DiracMeasure& diracs, double tolerance = 1e-10);

/// Exact dual potential of a max-of-planes configuration, evaluated through
/// the support functions of the exact cells:
/// phi*(x) = max over nonempty cells of [ v_k + sup_{y in C_k} (x - d_k).y ].
class DualPotential {
 public:
  DualPotential(const DiracMeasure& diracs, const Eigen::VectorXd& heights);
  double operator()(const Vec2& x) const;

 private:
  std::vector<Vec2> locations_;
  Eigen::VectorXd heights_;
  std::vector<DiskCell> cells_;
};

/// Scheme-versus-oracle comparison on the same measure: height discrepancies
/// (min-normalized, at the optimal common shift, and after aligning the full
/// potential fields to zero grid mean) and exact cell-area errors of the
/// scheme's recovered heights.
struct OracleComparison {
  double max_height_error = 0.0;          ///< both sides min-normalized
  double max_height_error_aligned = 0.0;  ///< at the best common shift
  double field_aligned_height_error = 0.0;  ///< fields aligned to zero mean
  Eigen::VectorXd cell_area_errors;
  double area_error_linf = 0.0;
  double area_error_rss = 0.0;
};

OracleComparison oracle_vs_scheme(const OracleResult& oracle, const SolveReport& report,
                                  const DiracMeasure& diracs, const Grid& grid);

/// Exact cell areas for given heights (one laguerre_cell build per Dirac).
Eigen::VectorXd cell_areas(const DiracMeasure& diracs, const Eigen::VectorXd& heights);

}  // namespace madot
