#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "madot/measure.hpp"

namespace madot {

enum class NodeClass : std::uint8_t { Interior, Dirac, BoundaryLayer };

/// Uniform grid over the computational square [-1,1]^2 with nx nodes per
/// dimension, padded on every side by `pad` extra node layers so that wide
/// stencils of width `pad` never leave the grid. Nodes are indexed row-major
/// over the padded square.
struct Grid {
  int nx = 0;
  int pad = 0;
  double h = 0.0;
  std::vector<NodeClass> node_class;   // per padded node
  std::vector<std::int32_t> dirac_id;  // per padded node, -1 if not a Dirac
  std::vector<int> dirac_nodes;        // node index of Dirac k

  int side() const { return nx + 2 * pad; }
  int num_nodes() const { return side() * side(); }
  int index(int ix, int iy) const { return iy * side() + ix; }
  int ix(int node) const { return node % side(); }
  int iy(int node) const { return node / side(); }
  Vec2 coord(int node) const {
    return Vec2(-1.0 + (ix(node) - pad) * h, -1.0 + (iy(node) - pad) * h);
  }
  bool contains(int ix_, int iy_) const {
    return ix_ >= 0 && ix_ < side() && iy_ >= 0 && iy_ < side();
  }
  NodeClass classify(int node) const { return node_class[node]; }
};

/// Builds the padded grid and classifies nodes. Every Dirac must coincide with
/// an interior node of the square; off-grid Diracs are rejected, not snapped.
Grid make_grid(int nx, int pad, const DiracMeasure& diracs);

/// A lattice direction (p,q) with coprime |p|,|q|, its angle in [0,2pi), its
/// length, and the angular quadrature weight (half the gap to both neighbours).
struct StencilDirection {
  int p = 0, q = 0;
  double angle = 0.0;
  double length = 0.0;
  double weight = 0.0;
};

/// All coprime lattice directions with max(|p|,|q|) <= width, sorted by angle.
/// Closed under rotation by pi/2 and pi; shared by every discrete operator.
struct StencilSet {
  int width = 0;
  std::vector<StencilDirection> dirs;
  std::vector<int> opposite;                   // index of (-p,-q)
  std::vector<int> perpendicular;              // index of (-q,p)
  std::vector<std::pair<int, int>> orth_pairs; // one entry per unordered line pair

  int count() const { return static_cast<int>(dirs.size()); }
  double max_weight() const;
};

StencilSet build_stencil(int width);

/// Stencil width schedule floor(1/sqrt(h)) used by default.
int default_stencil_width(double h);

/// Index of the node at x + sign*(p,q)*h. Throws std::out_of_range when the
/// step leaves the padded grid (a misconfigured layer width).
int neighbor(const Grid& grid, int node, const StencilDirection& dir, int sign);

}  // namespace madot
