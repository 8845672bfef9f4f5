#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "madot/newton.hpp"
#include "madot/oracle.hpp"

namespace madot {

enum class ProblemKind { OneDirac, TwoDirac, ThreeDirac, FiveDirac, TenDirac, RandomK, Custom };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::OneDirac;
  int count = 100;            ///< random_k only
  std::uint64_t seed = 1;     ///< random_k only
  int placement_grid = 129;   ///< random_k: Diracs drawn from this grid's nodes
  std::string file;           ///< custom only
};

/// A fully built problem instance. The named benchmark measures are generated
/// from their exact plane heights, with weights equal to the exact cell areas,
/// so the oracle must reproduce the heights to solver precision.
struct Problem {
  std::string name;
  DiracMeasure measure;
  Eigen::VectorXd exact_heights;                        ///< empty if unknown
  std::function<double(const Vec2&)> exact_potential;   ///< null if unknown
};

Problem build_problem(const ProblemSpec& spec);

/// Parses "one_dirac" | "two_dirac" | ... | "random:<count>:<seed>".
ProblemSpec parse_problem_name(const std::string& name);

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<int> grid_sizes = {33, 65};
  SolveMode mode = SolveMode::Aleksandrov;
  RMinusRule rminus_rule = RMinusRule::SupWindow;
  NewtonOptions solver;
  int stencil_width = 0;   ///< 0: per-grid schedule
  int continuation = -1;   ///< -1 auto (on for 3+ Diracs), 0 off, 1 on
  bool with_oracle = true; ///< height comparison (skipped above 20 Diracs)
  std::string output_dir;  ///< empty: no artifacts written
};

/// Reads the JSON config format described in the README.
ExperimentConfig load_config(const std::string& path);

constexpr double kNoValue = std::numeric_limits<double>::quiet_NaN();

struct ErrorRow {
  int nx = 0;
  bool solved = false;
  std::string failure;
  double potential_max_error = kNoValue;  ///< vs analytic solution, mean-aligned
  double height_max_error = kNoValue;     ///< vs oracle heights, min-normalized
  double area_linf = kNoValue;            ///< exact cell areas vs weights
  double area_rss = kNoValue;             ///< root-sum-square of cell-area errors
  int iterations = 0;
  double runtime_seconds = 0.0;

  double primary_error() const;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
  double fit_order = kNoValue;
  double fit_r2 = kNoValue;
  bool fit_available = false;
};

/// Runs the configured problem over every grid size: solve, metrics, artifact
/// files. A failed size is recorded in its row and the run continues.
ErrorTable run_experiment(const ExperimentConfig& config);

/// Least-squares slope of log(error) against log(h) with its r^2.
std::pair<double, double> convergence_fit(const std::vector<std::pair<double, double>>& h_err);

/// Labels every square node inside the disk with 1 + index of its image Dirac
/// (0 outside the disk), using the recovered heights.
Eigen::MatrixXi cell_raster(const SolveReport& report, const DiracMeasure& diracs,
                            const Grid& grid);

/// Max-norm distance of u to the analytic potential after aligning both to
/// zero mean over the square nodes.
double potential_error_vs_exact(const SolveReport& report, const Grid& grid,
                                const std::function<double(const Vec2&)>& exact);

}  // namespace madot
