#include "madot/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace madot {

Grid make_grid(int nx, int pad, const DiracMeasure& diracs) {
  require(nx >= 5, "make_grid: nx must be at least 5");
  require(pad >= 1, "make_grid: pad must be at least 1");
  Grid g;
  g.nx = nx;
  g.pad = pad;
  g.h = 2.0 / (nx - 1);
  const int side = g.side();
  g.node_class.assign(side * side, NodeClass::BoundaryLayer);
  g.dirac_id.assign(side * side, -1);

  // Nodes strictly inside the square carry the PDE; the square boundary and
  // the padding carry the state-constraint equation.
  for (int iy = pad + 1; iy < pad + nx - 1; ++iy)
    for (int ix = pad + 1; ix < pad + nx - 1; ++ix)
      g.node_class[g.index(ix, iy)] = NodeClass::Interior;

  g.dirac_nodes.resize(diracs.size());
  for (int k = 0; k < diracs.size(); ++k) {
    const Vec2& d = diracs.locations[k];
    const double fx = (d.x() + 1.0) / g.h;
    const double fy = (d.y() + 1.0) / g.h;
    const int ix = static_cast<int>(std::lround(fx));
    const int iy = static_cast<int>(std::lround(fy));
    require(std::abs(fx - ix) <= 1e-9 && std::abs(fy - iy) <= 1e-9,
            "make_grid: Dirac location does not coincide with a grid node");
    const int node = g.index(ix + pad, iy + pad);
    require(g.node_class[node] == NodeClass::Interior,
            "make_grid: Dirac node must be interior to the square");
    g.node_class[node] = NodeClass::Dirac;
    g.dirac_id[node] = k;
    g.dirac_nodes[k] = node;
  }
  return g;
}

double StencilSet::max_weight() const {
  double m = 0.0;
  for (const auto& d : dirs) m = std::max(m, d.weight);
  return m;
}

StencilSet build_stencil(int width) {
  require(width >= 1, "build_stencil: width must be at least 1");
  StencilSet s;
  s.width = width;
  for (int p = -width; p <= width; ++p) {
    for (int q = -width; q <= width; ++q) {
      if (p == 0 && q == 0) continue;
      if (std::gcd(std::abs(p), std::abs(q)) != 1) continue;
      StencilDirection d;
      d.p = p;
      d.q = q;
      d.angle = std::atan2(static_cast<double>(q), static_cast<double>(p));
      if (d.angle < 0.0) d.angle += 2.0 * kPi;
      d.length = std::sqrt(static_cast<double>(p * p + q * q));
      s.dirs.push_back(d);
    }
  }
  std::sort(s.dirs.begin(), s.dirs.end(),
            [](const StencilDirection& a, const StencilDirection& b) { return a.angle < b.angle; });

  const int n = s.count();
  for (int i = 0; i < n; ++i) {
    const double prev = s.dirs[(i + n - 1) % n].angle;
    const double next = s.dirs[(i + 1) % n].angle;
    double gap = next - prev;
    if (gap <= 0.0) gap += 2.0 * kPi;
    s.dirs[i].weight = 0.5 * gap;
  }

  auto find_dir = [&s, n](int p, int q) {
    for (int i = 0; i < n; ++i)
      if (s.dirs[i].p == p && s.dirs[i].q == q) return i;
    throw std::logic_error("build_stencil: direction set not closed under rotation");
  };
  s.opposite.resize(n);
  s.perpendicular.resize(n);
  for (int i = 0; i < n; ++i) {
    s.opposite[i] = find_dir(-s.dirs[i].p, -s.dirs[i].q);
    s.perpendicular[i] = find_dir(-s.dirs[i].q, s.dirs[i].p);
  }
  // One entry per unordered pair of orthogonal lattice lines: take the
  // representative with angle in [0, pi/2).
  for (int i = 0; i < n; ++i)
    if (s.dirs[i].angle < 0.5 * kPi - 1e-14) s.orth_pairs.emplace_back(i, s.perpendicular[i]);
  return s;
}

int default_stencil_width(double h) {
  require(h > 0.0, "default_stencil_width: h must be positive");
  int w = static_cast<int>(std::floor(1.0 / std::sqrt(h)));
  return std::max(1, w);
}

int neighbor(const Grid& grid, int node, const StencilDirection& dir, int sign) {
  const int ix = grid.ix(node) + sign * dir.p;
  const int iy = grid.iy(node) + sign * dir.q;
  if (!grid.contains(ix, iy))
    throw std::out_of_range("neighbor: step leaves the padded grid");
  return grid.index(ix, iy);
}

}  // namespace madot
