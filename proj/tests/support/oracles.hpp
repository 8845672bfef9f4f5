#pragma once

// Test-side oracles, independent of the implementation paths they check:
// continuous window minimizations done by brute-force angle sweeps, high
// resolution quadrature of polar integrals, and direct function sampling
// onto stencil views.

#include <cmath>
#include <functional>
#include <limits>

#include "madot/grid.hpp"
#include "madot/subgradient.hpp"

namespace madot::testing {

using AngleFn = std::function<double(double)>;

/// Samples a function onto every padded-grid node.
inline Eigen::VectorXd sample_grid(const Grid& g, const std::function<double(const Vec2&)>& f) {
  Eigen::VectorXd u(g.num_nodes());
  for (int node = 0; node < g.num_nodes(); ++node) u[node] = f(g.coord(node));
  return u;
}

/// Samples a function around the origin onto a stencil view with spacing h.
inline DiracNodeView view_of(const StencilSet& s, double h,
                             const std::function<double(const Vec2&)>& f) {
  DiracNodeView v;
  v.u0 = f(Vec2(0, 0));
  v.u_dir.resize(s.count());
  for (int i = 0; i < s.count(); ++i)
    v.u_dir[i] = f(Vec2(s.dirs[i].p * h, s.dirs[i].q * h));
  return v;
}

/// Brute-force continuous upper radial bound at angle theta for a function
/// with one-sided slope profile `slope`: the window infimum of
/// slope(t)^+ / cos(theta - t) over a dense sweep.
inline double continuous_r_plus(double theta, const AngleFn& slope, int sweep = 100000) {
  double best = std::numeric_limits<double>::infinity();
  for (int m = 0; m < sweep; ++m) {
    const double t = theta - 0.5 * kPi + kPi * (m + 0.5) / sweep;
    const double c = std::cos(theta - t);
    if (c <= 1e-12) continue;
    const double s = slope(t);
    best = std::min(best, (s > 0 ? s : 0.0) / c);
  }
  return best;
}

/// Same objective evaluated at the stencil angle nearest to the continuous
/// minimizer: an upper bound for the discrete window minimum.
inline double nearest_stencil_r_plus(const StencilSet& st, int i, const AngleFn& slope,
                                     int sweep = 100000) {
  const double theta = st.dirs[i].angle;
  double best = std::numeric_limits<double>::infinity();
  double arg = theta;
  for (int m = 0; m < sweep; ++m) {
    const double t = theta - 0.5 * kPi + kPi * (m + 0.5) / sweep;
    const double c = std::cos(theta - t);
    if (c <= 1e-12) continue;
    const double s = slope(t);
    const double val = (s > 0 ? s : 0.0) / c;
    if (val < best) {
      best = val;
      arg = t;
    }
  }
  // Nearest stencil direction to the continuous minimizer, inside the window.
  double bestgap = std::numeric_limits<double>::infinity();
  int jbest = -1;
  for (int j = 0; j < st.count(); ++j) {
    if (std::cos(theta - st.dirs[j].angle) <= 1e-12) continue;
    double gap = std::abs(std::remainder(st.dirs[j].angle - arg, 2 * kPi));
    if (gap < bestgap) {
      bestgap = gap;
      jbest = j;
    }
  }
  const double c = std::cos(theta - st.dirs[jbest].angle);
  const double s = slope(st.dirs[jbest].angle);
  return (s > 0 ? s : 0.0) / c;
}

/// Midpoint-rule integral of f over [0, 2pi).
inline double polar_integral(const AngleFn& f, int n = 1000000) {
  double acc = 0.0;
  for (int m = 0; m < n; ++m) acc += f(2 * kPi * (m + 0.5) / n);
  return acc * 2 * kPi / n;
}

/// One-sided slope profile of max(|x1|, |x2|) and the radial function of its
/// subgradient at the origin (the diamond with vertices on the axes).
inline double diamond_slope(double theta) {
  return std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
}
inline double diamond_radius(double theta) {
  return 1.0 / (std::abs(std::cos(theta)) + std::abs(std::sin(theta)));
}

}  // namespace madot::testing
