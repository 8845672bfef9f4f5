#include "madot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace madot {

namespace {

constexpr double kTol = 1e-12;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// CCW angle of the arc from a to b, both on the unit circle; result in (0, 2pi].
double ccw_angle(const Vec2& a, const Vec2& b) {
  double d = std::atan2(b.y(), b.x()) - std::atan2(a.y(), a.x());
  while (d <= 0.0) d += 2.0 * kPi;
  while (d > 2.0 * kPi) d -= 2.0 * kPi;
  return d;
}

// Clips a CCW convex polygon in place by {y : y.dot(n) <= b}.
void clip_halfplane(std::vector<Vec2>& poly, const Vec2& n, double b) {
  if (poly.empty()) return;
  std::vector<Vec2> out;
  out.reserve(poly.size() + 2);
  const int m = static_cast<int>(poly.size());
  for (int i = 0; i < m; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % m];
    const double dp = p.dot(n) - b;
    const double dq = q.dot(n) - b;
    const bool pin = dp <= kTol;
    const bool qin = dq <= kTol;
    if (pin) out.push_back(p);
    if (pin != qin && std::abs(dp - dq) > 0.0) {
      double t = dp / (dp - dq);
      out.push_back(p + t * (q - p));
    }
  }
  // Drop duplicate consecutive vertices introduced by near-vertex cuts.
  std::vector<Vec2> clean;
  clean.reserve(out.size());
  for (const Vec2& v : out) {
    if (clean.empty() || (v - clean.back()).norm() > 1e-14) clean.push_back(v);
  }
  while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= 1e-14) clean.pop_back();
  poly = std::move(clean);
  if (poly.size() < 3) poly.clear();
}

bool origin_in_polygon(const std::vector<Vec2>& poly) {
  const int m = static_cast<int>(poly.size());
  for (int i = 0; i < m; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % m];
    if (cross(q - p, -p) < -kTol) return false;
  }
  return true;
}

DiskCell make_full_disk() {
  DiskCell cell;
  cell.full_disk = true;
  cell.edges.push_back({Vec2(1, 0), Vec2(-1, 0), true});
  cell.edges.push_back({Vec2(-1, 0), Vec2(1, 0), true});
  cell.area = kPi;
  return cell;
}

// Intersects a CCW convex polygon with the unit disk, producing the
// alternating chord/arc boundary. The polygon must not have edges that are
// tangent-only touches of the circle closer than kTol; Laguerre cells built
// from the oversized bounding box never do.
DiskCell clip_polygon_to_disk(const std::vector<Vec2>& poly) {
  DiskCell cell;
  if (poly.size() < 3) return cell;

  struct Piece {
    Vec2 a, b;
  };
  std::vector<Piece> pieces;
  const int m = static_cast<int>(poly.size());
  for (int i = 0; i < m; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % m];
    const Vec2 d = q - p;
    const double a2 = d.squaredNorm();
    if (a2 <= 0.0) continue;
    const double b1 = p.dot(d);
    const double c1 = p.squaredNorm() - 1.0;
    const double disc = b1 * b1 - a2 * c1;
    if (disc <= 0.0) continue;  // line misses the disk (or grazes it)
    const double sq = std::sqrt(disc);
    double tlo = std::max(0.0, (-b1 - sq) / a2);
    double thi = std::min(1.0, (-b1 + sq) / a2);
    if (thi - tlo <= 1e-13) continue;
    pieces.push_back({p + tlo * d, p + thi * d});
  }

  if (pieces.empty()) {
    // No boundary crossing: full disk, polygon inside disk, or disjoint.
    if (origin_in_polygon(poly)) return make_full_disk();
    bool all_inside = true;
    for (const Vec2& v : poly) {
      if (v.squaredNorm() > 1.0 + 1e-10) {
        all_inside = false;
        break;
      }
    }
    if (all_inside) {
      for (int i = 0; i < m; ++i) cell.edges.push_back({poly[i], poly[(i + 1) % m], false});
      double area = 0.0;
      for (const CellEdge& e : cell.edges) area += 0.5 * cross(e.a, e.b);
      cell.area = area;
      return cell;
    }
    return cell;  // disjoint: empty
  }

  double area = 0.0;
  const int np = static_cast<int>(pieces.size());
  for (int i = 0; i < np; ++i) {
    const Piece& cur = pieces[i];
    const Piece& nxt = pieces[(i + 1) % np];
    if ((cur.b - cur.a).norm() > 1e-14) {
      cell.edges.push_back({cur.a, cur.b, false});
      area += 0.5 * cross(cur.a, cur.b);
    }
    if ((nxt.a - cur.b).norm() > 1e-12) {
      // Gap along the circle: the region boundary follows a CCW arc.
      cell.edges.push_back({cur.b, nxt.a, true});
      area += 0.5 * ccw_angle(cur.b, nxt.a);
    }
  }
  cell.area = std::max(0.0, area);
  return cell;
}

}  // namespace

void validate(const DiracMeasure& mu, double sum_tol) {
  const int k = mu.size();
  require(k >= 1, "DiracMeasure: at least one Dirac required");
  require(mu.weights.size() == k, "DiracMeasure: weight/location count mismatch");
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    require(mu.locations[i].allFinite(), "DiracMeasure: non-finite location");
    require(mu.weights[i] > 0.0, "DiracMeasure: weights must be positive");
    require(std::abs(mu.locations[i].x()) < 1.0 && std::abs(mu.locations[i].y()) < 1.0,
            "DiracMeasure: locations must lie inside the computational square");
    sum += mu.weights[i];
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if ((mu.locations[i] - mu.locations[j]).norm() <= 1e-14)
        throw DegenerateInputError("DiracMeasure: duplicate Dirac locations");
  require(std::abs(sum - kPi) <= sum_tol, "DiracMeasure: weights must sum to pi");
}

ConvexTarget ConvexTarget::convex_polygon(std::vector<Vec2> verts) {
  require(verts.size() >= 3, "convex_polygon: need at least 3 vertices");
  const int m = static_cast<int>(verts.size());
  for (int i = 0; i < m; ++i) {
    const Vec2 e0 = verts[(i + 1) % m] - verts[i];
    const Vec2 e1 = verts[(i + 2) % m] - verts[(i + 1) % m];
    require(cross(e0, e1) > 0.0, "convex_polygon: vertices must be strictly convex CCW");
  }
  ConvexTarget t;
  t.kind = Kind::ConvexPolygon;
  t.vertices = std::move(verts);
  return t;
}

double support_function(const ConvexTarget& target, const Vec2& n) {
  require(std::abs(n.norm() - 1.0) <= 1e-12, "support_function: direction must be unit length");
  if (target.kind == ConvexTarget::Kind::UnitDisk) return 1.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec2& v : target.vertices) best = std::max(best, v.dot(n));
  return best;
}

double signed_distance(const ConvexTarget& target, const Vec2& p) {
  if (target.kind == ConvexTarget::Kind::UnitDisk) return p.norm() - 1.0;
  const auto& v = target.vertices;
  const int m = static_cast<int>(v.size());
  double max_plane = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    Vec2 e = v[(i + 1) % m] - v[i];
    Vec2 n(e.y(), -e.x());  // outward for a CCW polygon
    n.normalize();
    max_plane = std::max(max_plane, (p - v[i]).dot(n));
  }
  if (max_plane <= 0.0) return max_plane;  // inside: distance to nearest edge line
  double dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % m];
    const Vec2 e = b - a;
    double t = std::clamp((p - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    dist = std::min(dist, (p - (a + t * e)).norm());
  }
  return dist;
}

DiskCell laguerre_cell(const DiracMeasure& diracs, const Eigen::VectorXd& heights, int k) {
  const int n = diracs.size();
  require(k >= 0 && k < n, "laguerre_cell: index out of range");
  require(heights.size() == n, "laguerre_cell: height count mismatch");
  require(heights.allFinite(), "laguerre_cell: heights must be finite");
  if (n == 1) return make_full_disk();

  // Start from a box strictly containing the disk; its edges never reach the
  // circle, so every chord of the final boundary comes from a real bisector.
  std::vector<Vec2> poly = {Vec2(-2, -2), Vec2(2, -2), Vec2(2, 2), Vec2(-2, 2)};
  for (int j = 0; j < n; ++j) {
    if (j == k) continue;
    const Vec2 dn = diracs.locations[j] - diracs.locations[k];
    const double off = heights[j] - heights[k];
    const double len = dn.norm();
    if (len <= 1e-14) {
      if (std::abs(off) <= 1e-14)
        throw DegenerateInputError("laguerre_cell: duplicate Diracs with equal heights");
      if (off > 0.0) continue;  // the other plane lies strictly below: no constraint
      return DiskCell{};        // this plane is dominated everywhere
    }
    clip_halfplane(poly, dn / len, off / len);
    if (poly.empty()) return DiskCell{};
  }
  return clip_polygon_to_disk(poly);
}

double cell_area(const DiskCell& cell) {
  double area = 0.0;
  for (const CellEdge& e : cell.edges) {
    area += 0.5 * cross(e.a, e.b);
    if (e.is_arc) {
      const double phi = ccw_angle(e.a, e.b);
      area += 0.5 * (phi - std::sin(phi));
    }
  }
  return std::max(0.0, area);
}

double support_function(const DiskCell& cell, const Vec2& w) {
  const double len = w.norm();
  if (len <= 0.0) return cell.edges.empty() && !cell.full_disk
                             ? -std::numeric_limits<double>::infinity()
                             : 0.0;
  if (cell.full_disk) return len;
  if (cell.edges.empty()) return -std::numeric_limits<double>::infinity();
  double best = -std::numeric_limits<double>::infinity();
  for (const CellEdge& e : cell.edges) {
    best = std::max(best, std::max(w.dot(e.a), w.dot(e.b)));
    if (e.is_arc) {
      // The sup over an arc is |w| when the direction of w lies inside it.
      const Vec2 dir = w / len;
      if (ccw_angle(e.a, dir) <= ccw_angle(e.a, e.b) + 1e-14) best = std::max(best, len);
    }
  }
  return best;
}

bool in_laguerre_cell(const DiracMeasure& diracs, const Eigen::VectorXd& heights, int k,
                      const Vec2& y) {
  const int n = diracs.size();
  for (int j = 0; j < n; ++j) {
    if (j == k) continue;
    if (y.dot(diracs.locations[j] - diracs.locations[k]) > heights[j] - heights[k]) return false;
  }
  return true;
}

McArea mc_area(const DiracMeasure& diracs, const Eigen::VectorXd& heights, int k,
               std::int64_t samples, std::uint64_t seed) {
  require(samples >= 1, "mc_area: sample count must be positive");
  require(k >= 0 && k < diracs.size(), "mc_area: index out of range");
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples;) {
    const Vec2 y(2.0 * unit() - 1.0, 2.0 * unit() - 1.0);
    if (y.squaredNorm() > 1.0) continue;  // rejection: uniform on the disk
    ++s;
    if (in_laguerre_cell(diracs, heights, k, y)) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  McArea out;
  out.estimate = kPi * p;
  out.std_error = kPi * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  out.samples = samples;
  return out;
}

}  // namespace madot
