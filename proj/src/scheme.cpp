#include "madot/scheme.hpp"

#include <cmath>

#include "madot/parallel.hpp"

namespace madot {

namespace {

inline double neg_part(double x, double eps) { return pos_part(-x, eps); }

inline std::int8_t sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

Vec2 layer_normal(const Grid& grid, int node) {
  const Vec2 x = grid.coord(node);
  const double tol = 0.5 * grid.h;
  double sx = 0.0, sy = 0.0;
  if (x.x() >= 1.0 - tol) sx = 1.0;
  if (x.x() <= -1.0 + tol) sx = -1.0;
  if (x.y() >= 1.0 - tol) sy = 1.0;
  if (x.y() <= -1.0 + tol) sy = -1.0;
  Vec2 n(sx, sy);
  const double len = n.norm();
  require(len > 0.0, "layer_normal: node is not in the boundary layer");
  return n / len;
}

// Gradient of u by central differences, for the source quotient only.
Vec2 central_gradient(const Eigen::VectorXd& u, const Grid& grid, int node) {
  const int ix = grid.ix(node), iy = grid.iy(node);
  const double ue = u[grid.index(ix + 1, iy)];
  const double uw = u[grid.index(ix - 1, iy)];
  const double un = u[grid.index(ix, iy + 1)];
  const double us = u[grid.index(ix, iy - 1)];
  return Vec2((ue - uw) / (2.0 * grid.h), (un - us) / (2.0 * grid.h));
}

}  // namespace

Discretization make_discretization(const DiracMeasure& diracs, SchemeParams params) {
  validate(diracs);
  require(params.nx >= 5, "make_discretization: nx must be at least 5");
  Discretization d;
  const double h = 2.0 / (params.nx - 1);
  if (params.stencil_width <= 0) params.stencil_width = default_stencil_width(h);
  if (params.n_target_dirs <= 0) params.n_target_dirs = 4 * params.nx;
  require(params.n_target_dirs >= 8, "make_discretization: target fan too coarse");

  d.diracs = diracs;
  d.params = params;
  d.stencil = build_stencil(params.stencil_width);
  d.grid = make_grid(params.nx, params.stencil_width, diracs);

  d.fan.resize(params.n_target_dirs);
  d.fan_support.resize(params.n_target_dirs);
  for (int j = 0; j < params.n_target_dirs; ++j) {
    const double a = 2.0 * kPi * (j + 1) / params.n_target_dirs;
    d.fan[j] = Vec2(std::cos(a), std::sin(a));
    d.fan_support[j] = support_function(params.target, d.fan[j]);
  }

  const double w = params.stencil_width;
  d.baseline_density = 4.0 / ((w * w + (w - 1.0) * (w - 1.0)) * d.grid.h * d.grid.h);
  return d;
}

bool ResidualField::selections_equal(const ResidualField& other) const {
  return ma == other.ma && hj == other.hj && dirac == other.dirac;
}

double second_difference(const Eigen::VectorXd& u, const Grid& grid, int node,
                         const StencilDirection& dir) {
  const int fwd = neighbor(grid, node, dir, +1);
  const int bwd = neighbor(grid, node, dir, -1);
  const double lh = dir.length * grid.h;
  return (u[fwd] + u[bwd] - 2.0 * u[node]) / (lh * lh);
}

double convexified_ma_residual(const Eigen::VectorXd& u, const Discretization& disc, int node,
                               MaSelection* sel) {
  const SchemeParams& p = disc.params;
  const int side = disc.grid.side();
  const double h2 = disc.grid.h * disc.grid.h;
  const double u0 = u[node];
  double best = std::numeric_limits<double>::infinity();
  MaSelection s;
  // Interior nodes cannot step outside the padded grid, so the neighbor
  // arithmetic is unchecked here.
  for (std::size_t pi = 0; pi < disc.stencil.orth_pairs.size(); ++pi) {
    const auto& [ia, ib] = disc.stencil.orth_pairs[pi];
    const StencilDirection& dir_a = disc.stencil.dirs[ia];
    const StencilDirection& dir_b = disc.stencil.dirs[ib];
    const int off_a = dir_a.q * side + dir_a.p;
    const int off_b = dir_b.q * side + dir_b.p;
    const double la2 = dir_a.length * dir_a.length * h2;
    const double lb2 = dir_b.length * dir_b.length * h2;
    const double da = (u[node + off_a] + u[node - off_a] - 2.0 * u0) / la2;
    const double db = (u[node + off_b] + u[node - off_b] - 2.0 * u0) / lb2;
    const double val = pos_part(da, p.smoothing_eps) * pos_part(db, p.smoothing_eps) -
                       neg_part(da, p.smoothing_eps) - neg_part(db, p.smoothing_eps);
    if (val < best) {
      best = val;
      s.pair = static_cast<std::int32_t>(pi);
      s.sign_a = sign_of(da);
      s.sign_b = sign_of(db);
    }
  }
  double r = -best;
  if (p.f_source) {
    const double f = p.f_source(disc.grid.coord(node));
    if (f != 0.0) {
      double g = 1.0;
      if (p.g_target) {
        g = p.g_target(central_gradient(u, disc.grid, node));
        require(g > 0.0, "convexified_ma_residual: target density must be positive");
      }
      r += f / g;
    }
  }
  if (sel) *sel = s;
  return r;
}

double hj_residual(const Eigen::VectorXd& u, const Discretization& disc, int node,
                   std::int32_t* sel) {
  const Grid& grid = disc.grid;
  const Vec2 nrm = layer_normal(grid, node);
  const int ix = grid.ix(node), iy = grid.iy(node);
  const double u0 = u[node];
  const double h = grid.h;
  // Upwind first differences; a difference whose neighbour would leave the
  // padded grid contributes zero to the advection term.
  auto diff = [&](int jx, int jy, double sign) {
    return grid.contains(jx, jy) ? sign * (u[grid.index(jx, jy)] - u0) / h : 0.0;
  };
  const double d_w = diff(ix - 1, iy, -1.0);
  const double d_e = diff(ix + 1, iy, +1.0);
  const double d_s = diff(ix, iy - 1, -1.0);
  const double d_n = diff(ix, iy + 1, +1.0);

  double best = -std::numeric_limits<double>::infinity();
  std::int32_t arg = -1;
  for (int j = 0; j < static_cast<int>(disc.fan.size()); ++j) {
    const Vec2& n = disc.fan[j];
    if (n.dot(nrm) <= 0.0) continue;
    const double adv = (n.x() > 0.0 ? n.x() * d_w : n.x() * d_e) +
                       (n.y() > 0.0 ? n.y() * d_s : n.y() * d_n);
    const double val = adv - disc.fan_support[j];
    if (val > best) {
      best = val;
      arg = j;
    }
  }
  if (sel) *sel = arg;
  return best;
}

ResidualField assemble_residual(const Eigen::VectorXd& u, const Discretization& disc) {
  const Grid& grid = disc.grid;
  const int n = grid.num_nodes();
  require(static_cast<int>(u.size()) == n, "assemble_residual: wrong vector size");

  ResidualField f;
  f.r.resize(n);
  f.ma.assign(n, MaSelection{});
  f.hj.assign(n, -1);
  f.dirac.resize(disc.diracs.size());

  const double h2 = grid.h * grid.h;
  const SchemeParams& p = disc.params;

  parallel_for(n, [&](int node) {
    switch (grid.classify(node)) {
      case NodeClass::Interior:
        f.r[node] = convexified_ma_residual(u, disc, node, &f.ma[node]) + h2 * u[node];
        break;
      case NodeClass::Dirac: {
        const int k = grid.dirac_id[node];
        if (p.mode == SolveMode::ViscosityBaseline) {
          f.r[node] = convexified_ma_residual(u, disc, node, &f.ma[node]) +
                      disc.baseline_density + h2 * u[node];
          break;
        }
        const DiracNodeView view = gather_dirac_view(u, grid, disc.stencil, node);
        RadialBounds rb;
        double m;
        if (p.g_target) {
          m = weighted_subgradient_measure(view, disc.stencil, grid.h, p.g_target,
                                           p.density_quad_order, p.rminus_rule, p.smoothing_eps,
                                           &rb);
        } else {
          m = subgradient_measure(view, disc.stencil, grid.h, p.rminus_rule, p.smoothing_eps, &rb);
        }
        f.r[node] = -m + disc.diracs.weights[k] + h2 * u[node];
        auto& sels = f.dirac[k];
        sels.resize(disc.stencil.count());
        for (int i = 0; i < disc.stencil.count(); ++i) {
          DiracAngleSelection s;
          s.arg_plus = rb.arg_plus[i];
          s.arg_minus = rb.arg_minus[i];
          if (s.arg_plus >= 0 && view.u_dir[s.arg_plus] - view.u0 > 0.0) s.flags |= 1;
          if (s.arg_minus >= 0 &&
              view.u0 - view.u_dir[disc.stencil.opposite[s.arg_minus]] > 0.0)
            s.flags |= 2;
          if (rb.contributes[i]) s.flags |= 4;
          sels[i] = s;
        }
        break;
      }
      case NodeClass::BoundaryLayer:
        f.r[node] = hj_residual(u, disc, node, &f.hj[node]);
        break;
    }
  });
  return f;
}

int augmented_row_count(const Discretization& disc) {
  int n = 0;
  for (int node = 0; node < disc.grid.num_nodes(); ++node)
    if (disc.grid.classify(node) != NodeClass::BoundaryLayer) ++n;
  return n;
}

double mean_zero_constant(const Eigen::VectorXd& v, const Discretization& disc) {
  // Substituting u = v + c into the summed equation leaves the scalar balance
  // h^2 sum(v) + h^2 (N - 1) c = 0 over the N augmented rows.
  double sum = 0.0;
  int n = 0;
  for (int node = 0; node < disc.grid.num_nodes(); ++node) {
    if (disc.grid.classify(node) == NodeClass::BoundaryLayer) continue;
    sum += v[node];
    ++n;
  }
  if (n <= 1) throw SolverError("mean_zero_constant: degenerate normalization (too few rows)");
  return sum / (1.0 - n);
}

Eigen::VectorXd mean_zero_shift(const Eigen::VectorXd& v, const Discretization& disc) {
  return v.array() + mean_zero_constant(v, disc);
}

}  // namespace madot
