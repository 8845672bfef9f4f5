#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "madot/grid.hpp"

namespace madot {

/// Values of a grid function around one Dirac node: u0 at the node and one
/// value per stencil direction at the offset node d_k + (p,q)h.
struct DiracNodeView {
  double u0 = 0.0;
  Eigen::VectorXd u_dir;
};

DiracNodeView gather_dirac_view(const Eigen::VectorXd& u, const Grid& grid,
                                const StencilSet& stencil, int node);

/// (u_i - u0)/(l_i h): one-sided directional derivative along direction i.
double one_sided_derivative(const DiracNodeView& view, const StencilSet& stencil, int i, double h);

/// Rule for the lower radial bound. SupWindow maximizes over the angular
/// window, matching the continuum bound; InfWindow minimizes, reproducing the
/// displayed discrete formula. Both are monotone; SupWindow is the default.
enum class RMinusRule { SupWindow, InfWindow };

/// Per-angle radial bounds of the discrete subgradient, with the chosen
/// window direction per angle recorded for derivative assembly.
struct RadialBounds {
  Eigen::VectorXd r_plus, r_minus;
  std::vector<std::int32_t> arg_plus, arg_minus;  // direction index, -1 if window empty
  std::vector<std::uint8_t> contributes;          // filled by subgradient_measure: S_i > 0
};

RadialBounds radial_bounds(const DiracNodeView& view, const StencilSet& stencil, double h,
                           RMinusRule rule = RMinusRule::SupWindow, double smoothing_eps = 0.0);

/// Discrete subgradient measure at the Dirac node:
/// sum_i (dtheta_i / 2) (r_plus_i^2 - r_minus_i^2)^+.
/// Exact (machine precision) on lattice samples of a cone.
double subgradient_measure(const DiracNodeView& view, const StencilSet& stencil, double h,
                           RMinusRule rule = RMinusRule::SupWindow, double smoothing_eps = 0.0,
                           RadialBounds* bounds_out = nullptr);

/// Density-weighted measure sum_i dtheta_i [G_i(r_plus) - G_i(r_minus)]^+ with
/// G_i(R) the fixed-order Gauss-Legendre quadrature of g(r e_i) r on [0, R].
/// Throws if the density evaluates nonpositive at a quadrature node.
double weighted_subgradient_measure(const DiracNodeView& view, const StencilSet& stencil, double h,
                                    const std::function<double(const Vec2&)>& g, int quad_order,
                                    RMinusRule rule = RMinusRule::SupWindow,
                                    double smoothing_eps = 0.0, RadialBounds* bounds_out = nullptr);

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace madot
