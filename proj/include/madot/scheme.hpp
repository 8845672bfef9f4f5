#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "madot/geometry.hpp"
#include "madot/grid.hpp"
#include "madot/subgradient.hpp"

namespace madot {

/// Aleksandrov mode carries the subgradient-measure equations at the Diracs.
/// ViscosityBaseline instead smears each Dirac into a local density and keeps
/// the plain operator everywhere; it is the comparison baseline and is
/// expected to stall on non-radial problems.
enum class SolveMode { Aleksandrov, ViscosityBaseline };

struct SchemeParams {
  int nx = 65;
  int stencil_width = 0;   ///< 0: floor(1/sqrt(h))
  int n_target_dirs = 0;   ///< 0: 4*nx
  SolveMode mode = SolveMode::Aleksandrov;
  RMinusRule rminus_rule = RMinusRule::SupWindow;
  double smoothing_eps = 0.0;  ///< optional kink smoothing, debugging only
  ConvexTarget target = ConvexTarget::unit_disk();
  std::function<double(const Vec2&)> f_source;  ///< background density, default 0
  std::function<double(const Vec2&)> g_target;  ///< target density, default 1
  int density_quad_order = 16;
};

/// Everything fixed once per problem instance: grid, stencil, the direction
/// fan of the state constraint with precomputed support values, and the
/// smeared-Dirac density of the baseline mode.
struct Discretization {
  DiracMeasure diracs;
  SchemeParams params;
  Grid grid;
  StencilSet stencil;
  std::vector<Vec2> fan;
  Eigen::VectorXd fan_support;
  double baseline_density = 0.0;
};

Discretization make_discretization(const DiracMeasure& diracs, SchemeParams params);

struct MaSelection {
  std::int32_t pair = -1;
  std::int8_t sign_a = 0, sign_b = 0;
  bool operator==(const MaSelection&) const = default;
};

struct DiracAngleSelection {
  std::int32_t arg_plus = -1, arg_minus = -1;
  std::uint8_t flags = 0;  // bit0 plus numerator > 0, bit1 minus numerator > 0, bit2 S > 0
  bool operator==(const DiracAngleSelection&) const = default;
};

/// Residual values plus the per-row active selections (argmin pair, argmax fan
/// direction, active window directions). Derivative assembly reuses the
/// selections without re-minimizing; equality of selections across two
/// assemblies certifies that no kink was crossed.
struct ResidualField {
  Eigen::VectorXd r;
  std::vector<MaSelection> ma;
  std::vector<std::int32_t> hj;
  std::vector<std::vector<DiracAngleSelection>> dirac;

  bool selections_equal(const ResidualField& other) const;
};

/// (u(x + lhe) + u(x - lhe) - 2 u(x)) / (l h)^2 along a lattice direction.
double second_difference(const Eigen::VectorXd& u, const Grid& grid, int node,
                         const StencilDirection& dir);

/// Convexified operator at an interior node: minus the minimum over orthogonal
/// stencil pairs of (D+ D+ - D- - D-), plus the source quotient when a
/// background density is configured.
double convexified_ma_residual(const Eigen::VectorXd& u, const Discretization& disc, int node,
                               MaSelection* sel = nullptr);

/// State-constraint residual on the boundary layer: the largest violation of
/// the supporting-plane inequalities over the outward fan, with upwind first
/// differences. Values at nodes beyond the padded grid contribute zero.
double hj_residual(const Eigen::VectorXd& u, const Discretization& disc, int node,
                   std::int32_t* sel = nullptr);

/// The full residual: operator rows plus the h^2 u augmentation at interior
/// and Dirac rows; boundary-layer rows carry no augmentation.
ResidualField assemble_residual(const Eigen::VectorXd& u, const Discretization& disc);

/// The additive constant that turns a solution of the augmented system into a
/// solution of the summed (mean-constrained) equation, found from the scalar
/// balance of the h^2 terms on the actual augmented-node count.
double mean_zero_constant(const Eigen::VectorXd& v, const Discretization& disc);

Eigen::VectorXd mean_zero_shift(const Eigen::VectorXd& v, const Discretization& disc);

/// Number of augmented rows (interior plus Dirac nodes).
int augmented_row_count(const Discretization& disc);

}  // namespace madot
