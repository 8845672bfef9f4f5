#include "madot/subgradient.hpp"

#include <cmath>

namespace madot {

namespace {

constexpr double kCosTol = 1e-12;

// Window half-width is pi/2 with open endpoints: directions with
// cos(theta_i - theta_j) <= kCosTol are excluded (division guard).
inline double window_cos(const StencilSet& s, int i, int j) {
  return std::cos(s.dirs[i].angle - s.dirs[j].angle);
}

}  // namespace

DiracNodeView gather_dirac_view(const Eigen::VectorXd& u, const Grid& grid,
                                const StencilSet& stencil, int node) {
  DiracNodeView view;
  view.u0 = u[node];
  view.u_dir.resize(stencil.count());
  for (int i = 0; i < stencil.count(); ++i)
    view.u_dir[i] = u[neighbor(grid, node, stencil.dirs[i], +1)];
  return view;
}

double one_sided_derivative(const DiracNodeView& view, const StencilSet& stencil, int i,
                            double h) {
  require(i >= 0 && i < stencil.count(), "one_sided_derivative: direction index out of range");
  return (view.u_dir[i] - view.u0) / (stencil.dirs[i].length * h);
}

RadialBounds radial_bounds(const DiracNodeView& view, const StencilSet& stencil, double h,
                           RMinusRule rule, double smoothing_eps) {
  const int n = stencil.count();
  RadialBounds rb;
  rb.r_plus.resize(n);
  rb.r_minus.resize(n);
  rb.arg_plus.assign(n, -1);
  rb.arg_minus.assign(n, -1);

  for (int i = 0; i < n; ++i) {
    double best_plus = 2.0;  // diameter bound; never kept for a nonempty window
    int arg_plus = -1;
    double best_minus = rule == RMinusRule::SupWindow ? 0.0
                                                      : std::numeric_limits<double>::infinity();
    int arg_minus = -1;
    for (int j = 0; j < n; ++j) {
      const double c = window_cos(stencil, i, j);
      if (c <= kCosTol) continue;
      const double denom = stencil.dirs[j].length * h * c;
      const double vp = pos_part(view.u_dir[j] - view.u0, smoothing_eps) / denom;
      if (arg_plus < 0 || vp < best_plus) {
        best_plus = vp;
        arg_plus = j;
      }
      const double vm = pos_part(view.u0 - view.u_dir[stencil.opposite[j]], smoothing_eps) / denom;
      if (rule == RMinusRule::SupWindow ? (arg_minus < 0 || vm > best_minus)
                                        : (arg_minus < 0 || vm < best_minus)) {
        best_minus = vm;
        arg_minus = j;
      }
    }
    rb.r_plus[i] = best_plus;
    rb.r_minus[i] = arg_minus < 0 ? 0.0 : best_minus;
    rb.arg_plus[i] = arg_plus;
    rb.arg_minus[i] = arg_minus;
  }
  return rb;
}

double subgradient_measure(const DiracNodeView& view, const StencilSet& stencil, double h,
                           RMinusRule rule, double smoothing_eps, RadialBounds* bounds_out) {
  RadialBounds rb = radial_bounds(view, stencil, h, rule, smoothing_eps);
  const int n = stencil.count();
  rb.contributes.assign(n, 0);
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = rb.r_plus[i] * rb.r_plus[i] - rb.r_minus[i] * rb.r_minus[i];
    rb.contributes[i] = s > 0.0 ? 1 : 0;
    m += 0.5 * stencil.dirs[i].weight * pos_part(s, smoothing_eps);
  }
  if (bounds_out) *bounds_out = std::move(rb);
  return m;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  require(n >= 1, "gauss_legendre: order must be positive");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

double weighted_subgradient_measure(const DiracNodeView& view, const StencilSet& stencil, double h,
                                    const std::function<double(const Vec2&)>& g, int quad_order,
                                    RMinusRule rule, double smoothing_eps,
                                    RadialBounds* bounds_out) {
  require(static_cast<bool>(g), "weighted_subgradient_measure: density required");
  require(quad_order >= 1, "weighted_subgradient_measure: quadrature order must be positive");
  std::vector<double> qx, qw;
  gauss_legendre(quad_order, qx, qw);

  RadialBounds rb = radial_bounds(view, stencil, h, rule, smoothing_eps);
  const int n = stencil.count();
  rb.contributes.assign(n, 0);

  auto antideriv = [&](double radius, const Vec2& e) {
    // G(R) = int_0^R g(r e) r dr on [0, R] by Gauss-Legendre.
    double acc = 0.0;
    for (int q = 0; q < quad_order; ++q) {
      const double r = 0.5 * radius * (qx[q] + 1.0);
      const double gv = g(r * e);
      if (!(gv > 0.0))
        throw ContractViolation("weighted_subgradient_measure: density must be positive");
      acc += qw[q] * gv * r;
    }
    return 0.5 * radius * acc;
  };

  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 e(std::cos(stencil.dirs[i].angle), std::sin(stencil.dirs[i].angle));
    const double diff = antideriv(rb.r_plus[i], e) - antideriv(rb.r_minus[i], e);
    rb.contributes[i] = diff > 0.0 ? 1 : 0;
    m += stencil.dirs[i].weight * pos_part(diff, smoothing_eps);
  }
  if (bounds_out) *bounds_out = std::move(rb);
  return m;
}

}  // namespace madot
