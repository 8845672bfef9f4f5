#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "madot/measure.hpp"

namespace madot {

/// Convex target set of the transport: the unit disk or a convex polygon.
struct ConvexTarget {
  enum class Kind { UnitDisk, ConvexPolygon };
  Kind kind = Kind::UnitDisk;
  std::vector<Vec2> vertices;  ///< CCW, strictly convex; unused for the disk

  static ConvexTarget unit_disk() { return ConvexTarget{}; }
  static ConvexTarget convex_polygon(std::vector<Vec2> verts);
};

/// The set {y : y.dot(normal) <= offset} with unit normal.
struct HalfPlane {
  Vec2 normal;
  double offset;
};

/// One boundary edge of a cell: a straight chord, or a CCW arc of the unit
/// circle, running from a to b.
struct CellEdge {
  Vec2 a, b;
  bool is_arc = false;
};

/// Convex region equal to an intersection of half-planes clipped to the unit
/// disk. Edges form a closed CCW loop; an empty cell has no edges and area 0.
struct DiskCell {
  std::vector<CellEdge> edges;
  bool full_disk = false;
  double area = 0.0;
};

/// Support function of the target evaluated at a unit direction n:
/// sup over boundary points y0 of y0.dot(n).
double support_function(const ConvexTarget& target, const Vec2& n);

/// Signed distance to the target boundary: negative inside, zero on the
/// boundary, positive outside. For the unit disk this is |p| - 1.
double signed_distance(const ConvexTarget& target, const Vec2& p);

/// Laguerre cell of Dirac k for the plane heights v:
/// {y in B(0,1) : y.(d_j - d_k) <= v_j - v_k for all j}. May be empty.
DiskCell laguerre_cell(const DiracMeasure& diracs, const Eigen::VectorXd& heights, int k);

/// Area of a cell recomputed from its stored boundary: shoelace over the
/// vertex loop plus a circular-segment term per arc.
double cell_area(const DiskCell& cell);

/// Exact support value sup over the cell of w.y for an arbitrary direction w
/// (not necessarily unit). Empty cells give -infinity; w = 0 gives 0.
double support_function(const DiskCell& cell, const Vec2& w);

/// Membership test used by the Monte Carlo area oracle; boundary-inclusive.
bool in_laguerre_cell(const DiracMeasure& diracs, const Eigen::VectorXd& heights, int k,
                      const Vec2& y);

struct McArea {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// Unbiased Monte Carlo estimate of the cell area by uniform rejection
/// sampling on the disk. Independent of the exact cell construction: it only
/// uses the half-plane membership test.
McArea mc_area(const DiracMeasure& diracs, const Eigen::VectorXd& heights, int k,
               std::int64_t samples, std::uint64_t seed);

}  // namespace madot
