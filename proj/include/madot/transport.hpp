#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "madot/grid.hpp"
#include "madot/measure.hpp"

namespace madot {

/// phi(y) = max_k { y.d_k - v_k }, the transport potential on the disk.
struct MaxOfPlanesPotential {
  DiracMeasure diracs;
  Eigen::VectorXd heights;
};

/// psi(x) = min_k { v_k + |x - d_k| }; its convex envelope is the dual
/// potential solved for by the PDE scheme.
struct ConeMinFunction {
  DiracMeasure diracs;
  Eigen::VectorXd heights;
};

struct PotentialValue {
  double value = 0.0;
  int active_index = 0;  // smallest maximizing k
};

PotentialValue eval_potential(const MaxOfPlanesPotential& phi, const Vec2& y);

/// The optimal map: y goes to the Dirac whose plane attains the max, with ties
/// broken toward the smallest index.
Vec2 transport_map(const MaxOfPlanesPotential& phi, const Vec2& y);

/// Reads the plane heights off a grid potential, v_k = u(d_k), and normalizes
/// the vector to min height zero.
Eigen::VectorXd recover_heights(const Eigen::VectorXd& u, const Grid& grid,
                                const DiracMeasure& diracs);

/// Discrete double Legendre transform of a min-of-cones function, tabulated on
/// a fine grid. Test oracle for the converged PDE potential.
class ConeEnvelope {
 public:
  ConeEnvelope(const ConeMinFunction& psi, int resolution);
  double eval(const Vec2& x) const;

 private:
  std::vector<Vec2> points_;     // disk samples y
  Eigen::VectorXd transform_;    // psi*(y)
};

double cone_envelope_eval(const ConeMinFunction& psi, const Vec2& x, int resolution);

/// Sampled checks of the basic conjugacy properties of the potential:
/// convexity of the numeric dual, involution of the double transform,
/// attainment of equality in Young's inequality, and the single-plane cone dual.
struct DualityReport {
  double p1_convexity_violation = 0.0;
  double p3_involution_error = 0.0;
  double p4_attainment_error = 0.0;
  double p5_cone_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

DualityReport check_duality(const MaxOfPlanesPotential& phi, double tolerance,
                            int resolution = 121, std::uint64_t seed = 1);

}  // namespace madot
