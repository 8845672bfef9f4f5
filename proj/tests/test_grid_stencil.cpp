#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "madot/grid.hpp"

using namespace madot;

namespace {

DiracMeasure center_dirac() {
  DiracMeasure mu;
  mu.locations = {Vec2(0, 0)};
  mu.weights = Eigen::VectorXd::Constant(1, kPi);
  return mu;
}

int coprime_count(int w) {
  int n = 0;
  for (int p = -w; p <= w; ++p)
    for (int q = -w; q <= w; ++q)
      if ((p || q) && std::gcd(std::abs(p), std::abs(q)) == 1) ++n;
  return n;
}

}  // namespace

TEST_CASE("stencil width 1 is the 8-point neighborhood with uniform weights") {
  const StencilSet s = build_stencil(1);
  CHECK(s.count() == 8);
  for (const auto& d : s.dirs) CHECK(d.weight == doctest::Approx(kPi / 4).epsilon(1e-14));
}

TEST_CASE("stencil direction counts match the coprime enumeration") {
  CHECK(build_stencil(2).count() == 16);
  CHECK(build_stencil(2).count() == coprime_count(2));
  CHECK(build_stencil(3).count() == coprime_count(3));
  CHECK(build_stencil(5).count() == coprime_count(5));
}

TEST_CASE("stencil invariants: sorted angles, weights summing to 2pi, closure") {
  for (int w : {1, 2, 3, 4, 6}) {
    const StencilSet s = build_stencil(w);
    double sum = 0.0;
    for (int i = 0; i < s.count(); ++i) {
      sum += s.dirs[i].weight;
      CHECK(s.dirs[i].weight > 0.0);
      if (i) CHECK(s.dirs[i].angle > s.dirs[i - 1].angle);
      // pi-rotation and perpendicular partners exist and are consistent.
      const auto& opp = s.dirs[s.opposite[i]];
      CHECK(opp.p == -s.dirs[i].p);
      CHECK(opp.q == -s.dirs[i].q);
      const auto& perp = s.dirs[s.perpendicular[i]];
      CHECK(perp.p == -s.dirs[i].q);
      CHECK(perp.q == s.dirs[i].p);
    }
    CHECK(sum == doctest::Approx(2 * kPi).epsilon(1e-12));
    CHECK(static_cast<int>(s.orth_pairs.size()) == s.count() / 4);
  }
  CHECK_THROWS_AS(build_stencil(0), ContractViolation);
}

TEST_CASE("default width schedule") {
  CHECK(default_stencil_width(2.0 / 32) == 4);
  CHECK(default_stencil_width(2.0 / 64) == 5);
  CHECK(default_stencil_width(2.0 / 128) == 8);
  CHECK(default_stencil_width(2.0 / 256) == 11);
  // The angular resolution shrinks and h/dtheta shrinks along the schedule.
  double prev_dtheta = 10.0, prev_ratio = 10.0;
  for (int nx : {33, 65, 129, 257}) {
    const double h = 2.0 / (nx - 1);
    const StencilSet s = build_stencil(default_stencil_width(h));
    const double dtheta = s.max_weight();
    CHECK(dtheta < prev_dtheta);
    CHECK(h / dtheta < prev_ratio);
    prev_dtheta = dtheta;
    prev_ratio = h / dtheta;
  }
}

TEST_CASE("grid classification and Dirac nodes") {
  const Grid g = make_grid(9, 2, center_dirac());
  CHECK(g.side() == 13);
  CHECK(g.h == doctest::Approx(0.25));
  int interior = 0, dirac = 0, layer = 0;
  for (int node = 0; node < g.num_nodes(); ++node) {
    switch (g.classify(node)) {
      case NodeClass::Interior: ++interior; break;
      case NodeClass::Dirac: ++dirac; break;
      case NodeClass::BoundaryLayer: ++layer; break;
    }
  }
  CHECK(dirac == 1);
  CHECK(interior == 7 * 7 - 1);
  CHECK(layer == 13 * 13 - 7 * 7);
  const Vec2 d = g.coord(g.dirac_nodes[0]);
  CHECK(d.x() == doctest::Approx(0.0));
  CHECK(d.y() == doctest::Approx(0.0));
}

TEST_CASE("off-grid Diracs are rejected, not snapped") {
  DiracMeasure mu;
  mu.locations = {Vec2(0.1234, 0.0)};
  mu.weights = Eigen::VectorXd::Constant(1, kPi);
  CHECK_THROWS_AS(make_grid(9, 2, mu), ContractViolation);
}

TEST_CASE("neighbor stepping and range errors") {
  const Grid g = make_grid(9, 2, center_dirac());
  const StencilSet s = build_stencil(2);
  const int center = g.dirac_nodes[0];
  auto dir = [&](int p, int q) {
    for (const auto& d : s.dirs)
      if (d.p == p && d.q == q) return d;
    FAIL("direction missing");
    return s.dirs[0];
  };
  CHECK(neighbor(g, center, dir(1, 0), +1) == center + 1);
  CHECK(neighbor(g, center, dir(2, 1), -1) == center - 2 - g.side());
  const int corner = g.index(0, 0);
  CHECK_THROWS_AS(neighbor(g, corner, dir(1, 1), -1), std::out_of_range);
}
