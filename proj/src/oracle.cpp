#include "madot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace madot {

Eigen::VectorXd cell_areas(const DiracMeasure& diracs, const Eigen::VectorXd& heights) {
  Eigen::VectorXd areas(diracs.size());
  for (int k = 0; k < diracs.size(); ++k) areas[k] = laguerre_cell(diracs, heights, k).area;
  return areas;
}

OracleResult pogorelov_solve(const DiracMeasure& diracs, double tolerance) {
  validate(diracs);
  const int n = diracs.size();
  OracleResult out;
  out.heights = Eigen::VectorXd::Zero(n);

  const int sweep_limit = 10 * n * n;
  const double root_tol = std::min(1e-12, 0.05 * tolerance);

  auto area_of = [&](int k, double vk) {
    Eigen::VectorXd v = out.heights;
    v[k] = vk;
    return laguerre_cell(diracs, v, k).area;
  };

  for (out.sweeps = 0; out.sweeps < sweep_limit; ++out.sweeps) {
    for (int k = 0; k < n; ++k) {
      const double target = diracs.weights[k];
      // Area is nonincreasing in the height. The +-4 bracket covers every
      // admissible configuration: plane offsets over the disk stay below 4.
      double lo = out.heights[k] - 4.0, hi = out.heights[k] + 4.0;
      double alo = area_of(k, lo), ahi = area_of(k, hi);
      int expand = 0;
      while ((alo < target || ahi > target) && expand++ < 8) {
        lo -= 4.0;
        hi += 4.0;
        alo = area_of(k, lo);
        ahi = area_of(k, hi);
      }
      if (alo < target || ahi > target)
        throw SolverError("pogorelov_solve: bracket does not straddle the target area");
      while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        const double a = area_of(k, mid);
        if (std::abs(a - target) <= root_tol) {
          lo = hi = mid;
          break;
        }
        if (a > target)
          lo = mid;  // cell too big: raise the plane
        else
          hi = mid;
      }
      out.heights[k] = 0.5 * (lo + hi);
    }
    out.heights.array() -= out.heights.minCoeff();

    out.area_errors = cell_areas(diracs, out.heights) - diracs.weights;
    out.max_area_error = out.area_errors.lpNorm<Eigen::Infinity>();
    if (out.max_area_error <= tolerance) {
      ++out.sweeps;
      // Spot check against the Monte Carlo oracle on three random cells.
      std::mt19937_64 rng(0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(n));
      for (int s = 0; s < 3; ++s) {
        const int k = static_cast<int>(rng() % n);
        const McArea mc = mc_area(diracs, out.heights, k, 1000000, rng());
        const double dev = std::abs(mc.estimate - diracs.weights[k]);
        if (dev > 3.0 * std::max(mc.std_error, 1e-12)) out.mc_check_passed = false;
      }
      return out;
    }
  }
  std::ostringstream msg;
  msg << "pogorelov_solve: sweep limit " << sweep_limit
      << " exceeded, max area error " << out.max_area_error;
  throw SolverError(msg.str());
}

DualPotential::DualPotential(const DiracMeasure& diracs, const Eigen::VectorXd& heights)
    : locations_(diracs.locations), heights_(heights) {
  cells_.reserve(diracs.size());
  for (int k = 0; k < diracs.size(); ++k) cells_.push_back(laguerre_cell(diracs, heights, k));
}

double DualPotential::operator()(const Vec2& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cells_.size(); ++k) {
    const double s = support_function(cells_[k], x - locations_[k]);
    best = std::max(best, heights_[k] + s);
  }
  return best;
}

OracleComparison oracle_vs_scheme(const OracleResult& oracle, const SolveReport& report,
                                  const DiracMeasure& diracs, const Grid& grid) {
  require(oracle.heights.size() == diracs.size() && report.heights.size() == diracs.size(),
          "oracle_vs_scheme: measures do not match");
  OracleComparison cmp;
  Eigen::VectorXd vs = report.heights;
  Eigen::VectorXd vo = oracle.heights;
  vs.array() -= vs.minCoeff();
  vo.array() -= vo.minCoeff();
  const Eigen::VectorXd diff = vs - vo;
  cmp.max_height_error = diff.lpNorm<Eigen::Infinity>();
  cmp.max_height_error_aligned = 0.5 * (diff.maxCoeff() - diff.minCoeff());

  // Benchmark-table metric: shift the computed potential and the exact dual
  // potential of the oracle heights to zero mean over the square, then take
  // the largest discrepancy at the Dirac nodes.
  const DualPotential exact(diracs, oracle.heights);
  double sum_u = 0.0, sum_ex = 0.0;
  int count = 0;
  Eigen::VectorXd exact_at_dirac(diracs.size());
  for (int node = 0; node < grid.num_nodes(); ++node) {
    const Vec2 x = grid.coord(node);
    if (std::abs(x.x()) > 1.0 + 1e-12 || std::abs(x.y()) > 1.0 + 1e-12) continue;
    sum_u += report.u[node];
    sum_ex += exact(x);
    ++count;
  }
  for (int k = 0; k < diracs.size(); ++k) exact_at_dirac[k] = exact(diracs.locations[k]);
  const double mu = sum_u / count, mex = sum_ex / count;
  for (int k = 0; k < diracs.size(); ++k) {
    const double e =
        std::abs((report.u[grid.dirac_nodes[k]] - mu) - (exact_at_dirac[k] - mex));
    cmp.field_aligned_height_error = std::max(cmp.field_aligned_height_error, e);
  }

  cmp.cell_area_errors = cell_areas(diracs, report.heights) - diracs.weights;
  cmp.area_error_linf = cmp.cell_area_errors.lpNorm<Eigen::Infinity>();
  cmp.area_error_rss = cmp.cell_area_errors.norm();
  return cmp;
}

}  // namespace madot
