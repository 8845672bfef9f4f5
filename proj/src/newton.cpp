#include "madot/newton.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "madot/parallel.hpp"
#include "madot/transport.hpp"

namespace madot {

namespace {

using Entry = std::pair<int, double>;

void add_entry(std::vector<Entry>& row, int col, double val) {
  if (val == 0.0) return;
  for (auto& e : row) {
    if (e.first == col) {
      e.second += val;
      return;
    }
  }
  row.emplace_back(col, val);
}

void ma_row(const Eigen::VectorXd& u, const Discretization& disc, int node,
            const MaSelection& sel, std::vector<Entry>& row) {
  const double eps = disc.params.smoothing_eps;
  const Grid& grid = disc.grid;
  if (sel.pair < 0) return;
  const auto& [ia, ib] = disc.stencil.orth_pairs[sel.pair];
  const StencilDirection& da_dir = disc.stencil.dirs[ia];
  const StencilDirection& db_dir = disc.stencil.dirs[ib];
  const double da = second_difference(u, grid, node, da_dir);
  const double db = second_difference(u, grid, node, db_dir);

  // bracket = a+ b+ - a- - b-; residual carries -bracket.
  const double d_da = dpos_part(da, eps) * pos_part(db, eps) + dpos_part(-da, eps);
  const double d_db = dpos_part(db, eps) * pos_part(da, eps) + dpos_part(-db, eps);

  auto stencil_terms = [&](const StencilDirection& dir, double coef) {
    if (coef == 0.0) return;
    const double lh2 = dir.length * dir.length * grid.h * grid.h;
    add_entry(row, neighbor(grid, node, dir, +1), -coef / lh2);
    add_entry(row, neighbor(grid, node, dir, -1), -coef / lh2);
    add_entry(row, node, 2.0 * coef / lh2);
  };
  stencil_terms(da_dir, d_da);
  stencil_terms(db_dir, d_db);
}

void dirac_row(const Eigen::VectorXd& u, const Discretization& disc, int node, int k,
               const std::vector<DiracAngleSelection>& sels, std::vector<Entry>& row) {
  const double eps = disc.params.smoothing_eps;
  const Grid& grid = disc.grid;
  const StencilSet& st = disc.stencil;
  const DiracNodeView view = gather_dirac_view(u, grid, st, node);
  const bool weighted = static_cast<bool>(disc.params.g_target);

  for (int i = 0; i < st.count(); ++i) {
    const DiracAngleSelection& s = sels[i];
    const double dtheta = st.dirs[i].weight;
    // Positive-part factor of the angular contribution, from the recorded
    // activity; with smoothing it is re-evaluated from the radii below.
    double r_plus = 0.0, r_minus = 0.0, dsdp = 0.0, dsdm = 0.0;
    int col_plus = -1, col_minus = -1;
    if (s.arg_plus >= 0) {
      const int j = s.arg_plus;
      const double denom =
          st.dirs[j].length * grid.h * std::cos(st.dirs[i].angle - st.dirs[j].angle);
      const double num = view.u_dir[j] - view.u0;
      r_plus = pos_part(num, eps) / denom;
      dsdp = dpos_part(num, eps) / denom;  // d r_plus / d u_j
      col_plus = neighbor(grid, node, st.dirs[j], +1);
    }
    if (s.arg_minus >= 0) {
      const int j = s.arg_minus;
      const double denom =
          st.dirs[j].length * grid.h * std::cos(st.dirs[i].angle - st.dirs[j].angle);
      const double num = view.u0 - view.u_dir[st.opposite[j]];
      r_minus = pos_part(num, eps) / denom;
      dsdm = dpos_part(num, eps) / denom;  // d r_minus / d u0
      col_minus = neighbor(grid, node, st.dirs[st.opposite[j]], +1);
    }
    double wplus = r_plus, wminus = r_minus;
    double act;
    if (weighted) {
      const Vec2 e(std::cos(st.dirs[i].angle), std::sin(st.dirs[i].angle));
      wplus *= disc.params.g_target(r_plus * e);
      wminus *= disc.params.g_target(r_minus * e);
      if (eps > 0.0) {
        // Smoothed positive part needs the actual antiderivative difference.
        std::vector<double> qx, qw;
        gauss_legendre(disc.params.density_quad_order, qx, qw);
        auto antideriv = [&](double radius) {
          double acc = 0.0;
          for (std::size_t q = 0; q < qx.size(); ++q) {
            const double r = 0.5 * radius * (qx[q] + 1.0);
            acc += qw[q] * disc.params.g_target(r * e) * r;
          }
          return 0.5 * radius * acc;
        };
        act = dpos_part(antideriv(r_plus) - antideriv(r_minus), eps);
      } else {
        act = (s.flags & 4) ? 1.0 : 0.0;
      }
    } else {
      act = eps > 0.0 ? dpos_part(r_plus * r_plus - r_minus * r_minus, eps)
                      : ((s.flags & 4) ? 1.0 : 0.0);
    }
    if (act == 0.0) continue;
    // Residual carries -M; M accumulates dtheta * act * (w+ r+' - w- r-').
    const double cp = dtheta * act * wplus * dsdp;
    const double cm = dtheta * act * wminus * dsdm;
    if (cp != 0.0 && col_plus >= 0) {
      add_entry(row, col_plus, -cp);
      add_entry(row, node, cp);
    }
    if (cm != 0.0 && col_minus >= 0) {
      add_entry(row, node, cm);
      add_entry(row, col_minus, -cm);
    }
  }
}

void hj_row(const Discretization& disc, int node, std::int32_t sel, std::vector<Entry>& row) {
  if (sel < 0) return;
  const Grid& grid = disc.grid;
  const Vec2& n = disc.fan[sel];
  const int ix = grid.ix(node), iy = grid.iy(node);
  const double h = grid.h;
  // A dropped (off-grid) difference contributes nothing, including its
  // diagonal part.
  auto diff_entries = [&](int jx, int jy, double coef) {
    if (!grid.contains(jx, jy)) return;
    add_entry(row, node, coef);
    add_entry(row, grid.index(jx, jy), -coef);
  };
  if (n.x() > 0.0)
    diff_entries(ix - 1, iy, n.x() / h);
  else if (n.x() < 0.0)
    diff_entries(ix + 1, iy, -n.x() / h);
  if (n.y() > 0.0)
    diff_entries(ix, iy - 1, n.y() / h);
  else if (n.y() < 0.0)
    diff_entries(ix, iy + 1, -n.y() / h);
}

}  // namespace

SparseSystem assemble_jacobian(const Eigen::VectorXd& u, const ResidualField& field,
                               const Discretization& disc) {
  const Grid& grid = disc.grid;
  const int n = grid.num_nodes();
  std::vector<std::vector<Entry>> rows(n);

  const double h2 = grid.h * grid.h;
  parallel_for(n, [&](int node) {
    auto& row = rows[node];
    switch (grid.classify(node)) {
      case NodeClass::Interior:
        ma_row(u, disc, node, field.ma[node], row);
        add_entry(row, node, h2);
        break;
      case NodeClass::Dirac: {
        if (disc.params.mode == SolveMode::ViscosityBaseline) {
          ma_row(u, disc, node, field.ma[node], row);
        } else {
          const int k = grid.dirac_id[node];
          dirac_row(u, disc, node, k, field.dirac[k], row);
        }
        add_entry(row, node, h2);
        break;
      }
      case NodeClass::BoundaryLayer:
        hj_row(disc, node, field.hj[node], row);
        break;
    }
  });

  std::vector<Eigen::Triplet<double>> trips;
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.size();
  trips.reserve(nnz);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, v] : rows[i]) trips.emplace_back(i, j, v);

  SparseSystem sys;
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trips.begin(), trips.end());
  sys.rhs = -field.r;
  return sys;
}

Eigen::VectorXd sparse_solve(const SparseSystem& system) {
  require(system.matrix.rows() == system.matrix.cols(), "sparse_solve: system must be square");
  require(system.matrix.rows() == system.rhs.size(), "sparse_solve: rhs size mismatch");
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(system.matrix);
  lu.factorize(system.matrix);
  if (lu.info() != Eigen::Success)
    throw SolverError("sparse_solve: factorization failed (singular system)");
  Eigen::VectorXd x = lu.solve(system.rhs);
  // Backward-error criterion: residual relative to |rhs| + |J|_inf |x|_inf.
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(system.matrix.rows());
  for (int k = 0; k < system.matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.matrix, k); it; ++it)
      row_sums[it.row()] += std::abs(it.value());
  const double norm_j = row_sums.maxCoeff();
  auto backward_error = [&](const Eigen::VectorXd& sol, const Eigen::VectorXd& res) {
    const double scale = system.rhs.lpNorm<Eigen::Infinity>() +
                         norm_j * sol.lpNorm<Eigen::Infinity>() + 1e-300;
    return res.lpNorm<Eigen::Infinity>() / scale;
  };
  for (int refine = 0; refine < 4; ++refine) {
    const Eigen::VectorXd res = system.rhs - system.matrix * x;
    if (backward_error(x, res) <= 1e-10) return x;
    x += lu.solve(res);
  }
  const Eigen::VectorXd res = system.rhs - system.matrix * x;
  if (backward_error(x, res) > 1e-10)
    throw SolverError("sparse_solve: relative residual above 1e-10");
  return x;
}

SolveReport newton_solve(const Discretization& disc, const Eigen::VectorXd& initial,
                         const NewtonOptions& opts) {
  require(initial.allFinite(), "newton_solve: initial guess must be finite");
  const auto t0 = std::chrono::steady_clock::now();

  const int n = disc.grid.num_nodes();
  require(static_cast<int>(initial.size()) == n, "newton_solve: initial guess size mismatch");

  // Optional row/column permutation; the solution must not depend on it.
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm(n);
  if (opts.ordering_seed != 0) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::mt19937_64 rng(opts.ordering_seed);
    std::shuffle(p.begin(), p.end(), rng);
    for (int i = 0; i < n; ++i) perm.indices()[i] = p[i];
  } else {
    perm.setIdentity();
  }

  Eigen::VectorXd u = initial;
  ResidualField field = assemble_residual(u, disc);
  double rn = field.r.lpNorm<Eigen::Infinity>();

  SolveReport rep;
  rep.residual_history.push_back(rn);

  while (rn > opts.tolerance && rep.iterations < opts.max_iterations) {
    SparseSystem sys = assemble_jacobian(u, field, disc);
    Eigen::VectorXd delta;
    try {
      if (opts.ordering_seed != 0) {
        SparseSystem psys;
        psys.matrix = sys.matrix.twistedBy(perm);
        psys.rhs = perm * sys.rhs;
        delta = perm.inverse() * sparse_solve(psys);
      } else {
        delta = sparse_solve(sys);
      }
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " (Newton iteration " +
                        std::to_string(rep.iterations + 1) + ", residual " + std::to_string(rn) +
                        ")");
    }

    double lambda = 1.0;
    bool accepted = false;
    Eigen::VectorXd u_trial;
    ResidualField f_trial;
    double rt = rn;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      u_trial = u + lambda * delta;
      f_trial = assemble_residual(u_trial, disc);
      rt = f_trial.r.lpNorm<Eigen::Infinity>();
      if (rt < rn) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (rn <= opts.stall_tolerance) {
        rep.stalled = true;
        break;
      }
      throw StagnationError("newton_solve: no residual decrease after " +
                            std::to_string(opts.max_backtracks) + " backtracks at iteration " +
                            std::to_string(rep.iterations + 1) + ", residual " +
                            std::to_string(rn));
    }
    u = std::move(u_trial);
    field = std::move(f_trial);
    rn = rt;
    ++rep.iterations;
    rep.residual_history.push_back(rn);
    rep.damping_history.push_back(lambda);
  }

  rep.converged = rn <= opts.tolerance;
  rep.shift_constant = mean_zero_constant(u, disc);
  {
    double sum = 0.0;
    for (int node = 0; node < n; ++node)
      if (disc.grid.classify(node) != NodeClass::BoundaryLayer) sum += u[node];
    const double h2 = disc.grid.h * disc.grid.h;
    rep.paper_shift_constant = h2 / (h2 - 1.0) * sum;
  }
  rep.u = u.array() + rep.shift_constant;
  rep.heights = recover_heights(rep.u, disc.grid, disc.diracs);
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

Eigen::VectorXd default_initialization(const Grid& grid, const DiracMeasure& diracs) {
  Eigen::VectorXd u(grid.num_nodes());
  for (int node = 0; node < grid.num_nodes(); ++node) {
    const Vec2 x = grid.coord(node);
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& d : diracs.locations) best = std::min(best, (x - d).norm());
    u[node] = best;
  }
  return u;
}

Eigen::VectorXd interpolate_grid_function(const Eigen::VectorXd& coarse_u, const Grid& coarse,
                                          const Grid& fine) {
  Eigen::VectorXd out(fine.num_nodes());
  const int cs = coarse.side();
  for (int node = 0; node < fine.num_nodes(); ++node) {
    const Vec2 x = fine.coord(node);
    double fx = (x.x() + 1.0) / coarse.h + coarse.pad;
    double fy = (x.y() + 1.0) / coarse.h + coarse.pad;
    fx = std::clamp(fx, 0.0, cs - 1.000001);
    fy = std::clamp(fy, 0.0, cs - 1.000001);
    const int i0 = static_cast<int>(fx), j0 = static_cast<int>(fy);
    const double tx = fx - i0, ty = fy - j0;
    const double v00 = coarse_u[coarse.index(i0, j0)];
    const double v10 = coarse_u[coarse.index(i0 + 1, j0)];
    const double v01 = coarse_u[coarse.index(i0, j0 + 1)];
    const double v11 = coarse_u[coarse.index(i0 + 1, j0 + 1)];
    out[node] = (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 +
                tx * ty * v11;
  }
  return out;
}

namespace {

bool diracs_on_grid(const DiracMeasure& diracs, int nx) {
  const double h = 2.0 / (nx - 1);
  for (const Vec2& d : diracs.locations) {
    const double fx = (d.x() + 1.0) / h;
    const double fy = (d.y() + 1.0) / h;
    if (std::abs(fx - std::lround(fx)) > 1e-9 || std::abs(fy - std::lround(fy)) > 1e-9)
      return false;
  }
  return true;
}

}  // namespace

SolveReport solve_pipeline(const DiracMeasure& diracs, const SchemeParams& params,
                           const NewtonOptions& opts, bool continuation) {
  std::vector<int> ladder = {params.nx};
  if (continuation) {
    int m = params.nx;
    while ((m - 1) % 2 == 0 && (m + 1) / 2 >= 33 && diracs_on_grid(diracs, (m + 1) / 2)) {
      m = (m + 1) / 2;
      ladder.push_back(m);
    }
    std::reverse(ladder.begin(), ladder.end());
  }

  SolveReport rep;
  Eigen::VectorXd warm;
  Grid prev_grid;
  bool have_warm = false;
  for (int nx : ladder) {
    SchemeParams p = params;
    p.nx = nx;
    p.stencil_width = params.stencil_width;  // 0 keeps the per-level schedule
    const Discretization disc = make_discretization(diracs, p);
    Eigen::VectorXd init = have_warm ? interpolate_grid_function(warm, prev_grid, disc.grid)
                                     : default_initialization(disc.grid, diracs);
    rep = newton_solve(disc, init, opts);
    warm = rep.u;
    prev_grid = disc.grid;
    have_warm = true;
  }
  return rep;
}

}  // namespace madot
