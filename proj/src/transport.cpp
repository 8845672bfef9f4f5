#include "madot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "madot/parallel.hpp"

namespace madot {

namespace {

double cone_min(const ConeMinFunction& psi, const Vec2& x) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < psi.diracs.size(); ++k)
    best = std::min(best, psi.heights[k] + (x - psi.diracs.locations[k]).norm());
  return best;
}

}  // namespace

PotentialValue eval_potential(const MaxOfPlanesPotential& phi, const Vec2& y) {
  require(phi.diracs.size() >= 1, "eval_potential: empty potential");
  require(phi.heights.size() == phi.diracs.size(), "eval_potential: height count mismatch");
  PotentialValue out;
  out.value = y.dot(phi.diracs.locations[0]) - phi.heights[0];
  out.active_index = 0;
  for (int k = 1; k < phi.diracs.size(); ++k) {
    const double v = y.dot(phi.diracs.locations[k]) - phi.heights[k];
    if (v > out.value) {
      out.value = v;
      out.active_index = k;
    }
  }
  return out;
}

Vec2 transport_map(const MaxOfPlanesPotential& phi, const Vec2& y) {
  return phi.diracs.locations[eval_potential(phi, y).active_index];
}

Eigen::VectorXd recover_heights(const Eigen::VectorXd& u, const Grid& grid,
                                const DiracMeasure& diracs) {
  require(static_cast<int>(grid.dirac_nodes.size()) == diracs.size(),
          "recover_heights: grid was built for a different measure");
  Eigen::VectorXd v(diracs.size());
  for (int k = 0; k < diracs.size(); ++k) v[k] = u[grid.dirac_nodes[k]];
  v.array() -= v.minCoeff();
  return v;
}

ConeEnvelope::ConeEnvelope(const ConeMinFunction& psi, int resolution) {
  require(resolution >= 2, "ConeEnvelope: resolution must be at least 2");
  // First transform psi*(y) = sup_z { z.y - psi(z) } over a box of candidate
  // z plus the cone tips, where the sup is attained for |y| <= 1.
  std::vector<Vec2> zs;
  zs.reserve(resolution * resolution + psi.diracs.size());
  const double hz = 4.0 / (resolution - 1);
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i)
      zs.emplace_back(-2.0 + i * hz, -2.0 + j * hz);
  for (const Vec2& d : psi.diracs.locations) zs.push_back(d);

  const double hy = 2.0 / (resolution - 1);
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const Vec2 y(-1.0 + i * hy, -1.0 + j * hy);
      if (y.squaredNorm() > 1.0) continue;
      points_.push_back(y);
    }
  }
  transform_.resize(points_.size());
  Eigen::VectorXd psi_z(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) psi_z[i] = cone_min(psi, zs[i]);
  parallel_for(static_cast<int>(points_.size()), [&](int m) {
    const Vec2& y = points_[m];
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < zs.size(); ++i)
      best = std::max(best, zs[i].dot(y) - psi_z[i]);
    transform_[m] = best;
  });
}

double ConeEnvelope::eval(const Vec2& x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < points_.size(); ++m)
    best = std::max(best, points_[m].dot(x) - transform_[m]);
  return best;
}

double cone_envelope_eval(const ConeMinFunction& psi, const Vec2& x, int resolution) {
  return ConeEnvelope(psi, resolution).eval(x);
}

DualityReport check_duality(const MaxOfPlanesPotential& phi, double tolerance, int resolution,
                            std::uint64_t seed) {
  require(phi.diracs.size() >= 1 && phi.heights.size() == phi.diracs.size(),
          "check_duality: malformed potential");
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto disk_point = [&]() {
    while (true) {
      Vec2 y(2.0 * unit() - 1.0, 2.0 * unit() - 1.0);
      if (y.squaredNorm() <= 0.98) return y;
    }
  };

  // Dual sampled on the disk grid. phi is extended by +inf off the disk, so
  // the sup in phi* runs over disk points only.
  const double hy = 2.0 / (resolution - 1);
  std::vector<Vec2> ys;
  for (int j = 0; j < resolution; ++j)
    for (int i = 0; i < resolution; ++i) {
      const Vec2 y(-1.0 + i * hy, -1.0 + j * hy);
      if (y.squaredNorm() <= 1.0) ys.push_back(y);
    }
  Eigen::VectorXd phi_y(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) phi_y[i] = eval_potential(phi, ys[i]).value;
  auto dual = [&](const Vec2& x) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ys.size(); ++i)
      best = std::max(best, ys[i].dot(x) - phi_y[i]);
    return best;
  };

  // x box containing the Diracs (the dual's subgradient lives in the disk, so
  // midpoint checks near the hull are the informative ones).
  Vec2 lo(1e30, 1e30), hi(-1e30, -1e30);
  for (const Vec2& d : phi.diracs.locations) {
    lo = lo.cwiseMin(d);
    hi = hi.cwiseMax(d);
  }
  lo.array() -= 0.3;
  hi.array() += 0.3;
  auto box_point = [&]() {
    return Vec2(lo.x() + (hi.x() - lo.x()) * unit(), lo.y() + (hi.y() - lo.y()) * unit());
  };

  DualityReport rep;
  rep.tolerance = tolerance;

  for (int s = 0; s < 24; ++s) {
    const Vec2 a = box_point(), b = box_point();
    const double mid = dual(0.5 * (a + b));
    rep.p1_convexity_violation =
        std::max(rep.p1_convexity_violation, mid - 0.5 * (dual(a) + dual(b)));
  }

  // Involution phi** = phi on the disk, via a second grid transform over x.
  {
    const int rx = std::max(24, resolution / 2);
    std::vector<Vec2> xs;
    xs.reserve(rx * rx + phi.diracs.size());
    for (int j = 0; j < rx; ++j)
      for (int i = 0; i < rx; ++i)
        xs.emplace_back(lo.x() + (hi.x() - lo.x()) * i / (rx - 1.0),
                        lo.y() + (hi.y() - lo.y()) * j / (rx - 1.0));
    for (const Vec2& d : phi.diracs.locations) xs.push_back(d);
    Eigen::VectorXd dual_x(xs.size());
    parallel_for(static_cast<int>(xs.size()),
                 [&](int i) { dual_x[i] = dual(xs[i]); });
    for (int s = 0; s < 24; ++s) {
      const Vec2 y = disk_point();
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < xs.size(); ++i)
        best = std::max(best, xs[i].dot(y) - dual_x[i]);
      rep.p3_involution_error =
          std::max(rep.p3_involution_error, std::abs(best - eval_potential(phi, y).value));
    }
  }

  // Attainment: phi(y) + phi*(d_k) = d_k.y for the active plane k at y.
  for (int s = 0; s < 24; ++s) {
    const Vec2 y = disk_point();
    const PotentialValue pv = eval_potential(phi, y);
    const Vec2 d = phi.diracs.locations[pv.active_index];
    rep.p4_attainment_error =
        std::max(rep.p4_attainment_error, std::abs(pv.value + dual(d) - d.dot(y)));
  }

  // Single-plane dual equals the cone v + |x - d|.
  {
    MaxOfPlanesPotential one;
    one.diracs.locations = {phi.diracs.locations[0]};
    one.diracs.weights = Eigen::VectorXd::Constant(1, kPi);
    one.heights = Eigen::VectorXd::Constant(1, phi.heights[0]);
    Eigen::VectorXd plane_y(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i)
      plane_y[i] = ys[i].dot(one.diracs.locations[0]) - one.heights[0];
    for (int s = 0; s < 24; ++s) {
      const Vec2 x = box_point();
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ys.size(); ++i)
        best = std::max(best, ys[i].dot(x) - plane_y[i]);
      const double cone = one.heights[0] + (x - one.diracs.locations[0]).norm();
      rep.p5_cone_error = std::max(rep.p5_cone_error, std::abs(best - cone));
    }
  }

  rep.passed = rep.p1_convexity_violation <= tolerance && rep.p3_involution_error <= tolerance &&
               rep.p4_attainment_error <= tolerance && rep.p5_cone_error <= tolerance;
  return rep;
}

}  // namespace madot
