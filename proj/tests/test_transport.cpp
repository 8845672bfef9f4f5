#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "madot/harness.hpp"
#include "madot/transport.hpp"

using namespace madot;

namespace {

MaxOfPlanesPotential potential_of(const Problem& p) {
  return MaxOfPlanesPotential{p.measure, p.exact_heights};
}

MaxOfPlanesPotential random_potential(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-0.65, 0.65), hgt(0.0, 0.4);
  MaxOfPlanesPotential phi;
  while (static_cast<int>(phi.diracs.locations.size()) < k) {
    Vec2 d(pos(rng), pos(rng));
    bool clash = false;
    for (const Vec2& o : phi.diracs.locations)
      if ((d - o).norm() < 0.05) clash = true;
    if (!clash) phi.diracs.locations.push_back(d);
  }
  phi.diracs.weights = Eigen::VectorXd::Constant(k, kPi / k);
  phi.heights.resize(k);
  for (int i = 0; i < k; ++i) phi.heights[i] = hgt(rng);
  phi.heights.array() -= phi.heights.minCoeff();
  return phi;
}

}  // namespace

TEST_CASE("eval_potential basics and tie-breaking") {
  MaxOfPlanesPotential one;
  one.diracs.locations = {Vec2(0, 0)};
  one.diracs.weights = Eigen::VectorXd::Constant(1, kPi);
  one.heights = Eigen::VectorXd::Zero(1);
  const PotentialValue pv = eval_potential(one, Vec2(0.4, -0.7));
  CHECK(pv.value == doctest::Approx(0.0));
  CHECK(pv.active_index == 0);

  MaxOfPlanesPotential two;
  two.diracs.locations = {Vec2(-0.5, 0), Vec2(0.5, 0)};
  two.diracs.weights = Eigen::VectorXd::Constant(2, kPi / 2);
  two.heights = Eigen::VectorXd::Zero(2);
  const PotentialValue right = eval_potential(two, Vec2(0.3, 0));
  CHECK(right.value == doctest::Approx(0.15));
  CHECK(right.active_index == 1);
  // On the bisector both planes are equal; the smaller index wins.
  const PotentialValue tie = eval_potential(two, Vec2(0.0, 0.37));
  CHECK(tie.active_index == 0);
  CHECK(transport_map(two, Vec2(0.0, 0.37)) == Vec2(-0.5, 0.0));
}

TEST_CASE("transport map is consistent with cell membership") {
  std::mt19937_64 rng(31);
  const MaxOfPlanesPotential phi = random_potential(7, rng);
  std::uniform_real_distribution<double> c(-1, 1);
  for (int s = 0; s < 500; ++s) {
    const Vec2 y(c(rng), c(rng));
    if (y.squaredNorm() > 1.0) continue;
    const int k = eval_potential(phi, y).active_index;
    CHECK(in_laguerre_cell(phi.diracs, phi.heights, k, y));
  }
}

TEST_CASE("transport map is cyclically monotone on samples") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> c(-1, 1);
  for (int inst = 0; inst < 10; ++inst) {
    const MaxOfPlanesPotential phi = random_potential(3 + inst, rng);
    for (int s = 0; s < 200; ++s) {
      const Vec2 y1(c(rng), c(rng)), y2(c(rng), c(rng));
      const Vec2 t1 = transport_map(phi, y1), t2 = transport_map(phi, y2);
      CHECK((t1 - t2).dot(y1 - y2) >= -1e-14);
    }
  }
}

TEST_CASE("preimage areas of the exact three-Dirac potential equal the weights") {
  const Problem p = build_problem(parse_problem_name("three_dirac"));
  const MaxOfPlanesPotential phi = potential_of(p);
  // The preimage of d_k under the map is the cell; its exact area is alpha_k.
  for (int k = 0; k < 3; ++k) {
    const DiskCell cell = laguerre_cell(p.measure, p.exact_heights, k);
    CHECK(cell.area == doctest::Approx(p.measure.weights[k]).epsilon(1e-12));
  }
}

TEST_CASE("recover_heights from grids") {
  // Single Dirac: the exact cone has height zero.
  {
    const Problem p = build_problem(parse_problem_name("one_dirac"));
    const Grid g = make_grid(17, 2, p.measure);
    Eigen::VectorXd u(g.num_nodes());
    for (int n = 0; n < g.num_nodes(); ++n) u[n] = g.coord(n).norm() + 3.7;
    const Eigen::VectorXd v = recover_heights(u, g, p.measure);
    CHECK(v[0] == doctest::Approx(0.0));
  }
  // Five and ten Diracs: the benchmark height patterns, up to the common shift.
  for (const char* name : {"five_dirac", "ten_dirac"}) {
    const Problem p = build_problem(parse_problem_name(name));
    const Grid g = make_grid(33, 3, p.measure);
    Eigen::VectorXd u = Eigen::VectorXd::Constant(g.num_nodes(), -2.0);
    for (int k = 0; k < p.measure.size(); ++k)
      u[g.dirac_nodes[k]] = p.exact_heights[k] + 0.85;  // arbitrary shift
    const Eigen::VectorXd v = recover_heights(u, g, p.measure);
    for (int k = 0; k < p.measure.size(); ++k)
      CHECK(v[k] == doctest::Approx(p.exact_heights[k]).epsilon(1e-13));
  }
}

TEST_CASE("cone envelope: single cone is already convex") {
  ConeMinFunction psi;
  psi.diracs.locations = {Vec2(0.25, -0.25)};
  psi.diracs.weights = Eigen::VectorXd::Constant(1, kPi);
  psi.heights = Eigen::VectorXd::Constant(1, 0.3);
  const ConeEnvelope env(psi, 101);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> c(-0.9, 0.9);
  for (int s = 0; s < 50; ++s) {
    const Vec2 x(c(rng), c(rng));
    const double cone = 0.3 + (x - psi.diracs.locations[0]).norm();
    CHECK(env.eval(x) == doctest::Approx(cone).epsilon(0.03));
    CHECK(env.eval(x) <= cone + 1e-9);
  }
}

TEST_CASE("cone envelope matches the two-Dirac analytic potential") {
  const Problem p = build_problem(parse_problem_name("two_dirac"));
  ConeMinFunction psi{p.measure, p.exact_heights};
  const int res = 161;
  const double hy = 2.0 / (res - 1);
  const ConeEnvelope env(psi, res);
  double max_err = 0.0;
  for (double x = -0.95; x <= 0.95; x += 0.19) {
    for (double y = -0.95; y <= 0.95; y += 0.19) {
      const Vec2 q(x, y);
      max_err = std::max(max_err, std::abs(env.eval(q) - p.exact_potential(q)));
    }
  }
  CHECK(max_err <= 4.0 * hy);
}

TEST_CASE("cone envelope never exceeds the cone minimum and touches at tips") {
  std::mt19937_64 rng(12);
  const MaxOfPlanesPotential phi = random_potential(3, rng);
  ConeMinFunction psi{phi.diracs, phi.heights};
  const ConeEnvelope env(psi, 121);
  std::uniform_real_distribution<double> c(-0.9, 0.9);
  auto cones = [&](const Vec2& x) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < psi.diracs.size(); ++k)
      best = std::min(best, psi.heights[k] + (x - psi.diracs.locations[k]).norm());
    return best;
  };
  for (int s = 0; s < 100; ++s) {
    const Vec2 x(c(rng), c(rng));
    CHECK(env.eval(x) <= cones(x) + 1e-9);
  }
  for (int k = 0; k < psi.diracs.size(); ++k) {
    const Vec2& d = psi.diracs.locations[k];
    CHECK(env.eval(d) == doctest::Approx(psi.heights[k]).epsilon(0.05));
  }
}

TEST_CASE("duality properties on random instances") {
  std::mt19937_64 rng(77);
  for (int inst = 0; inst < 8; ++inst) {
    const MaxOfPlanesPotential phi = random_potential(2 + inst % 5, rng);
    const int res = 121;
    const double tol = 6.0 * 2.0 / (res - 1);
    const DualityReport rep = check_duality(phi, tol, res, rng());
    CAPTURE(rep.p1_convexity_violation);
    CAPTURE(rep.p3_involution_error);
    CAPTURE(rep.p4_attainment_error);
    CAPTURE(rep.p5_cone_error);
    CHECK(rep.passed);
  }
}

TEST_CASE("attainment identity is exact algebraically") {
  std::mt19937_64 rng(3);
  const MaxOfPlanesPotential phi = random_potential(5, rng);
  std::uniform_real_distribution<double> c(-0.9, 0.9);
  for (int s = 0; s < 200; ++s) {
    const Vec2 y(c(rng), c(rng));
    if (y.squaredNorm() > 1) continue;
    const PotentialValue pv = eval_potential(phi, y);
    const int k = pv.active_index;
    // phi(y) + v_k = d_k . y with phi*(d_k) = v_k.
    const double lhs = pv.value + phi.heights[k];
    CHECK(lhs == doctest::Approx(phi.diracs.locations[k].dot(y)).epsilon(1e-14));
  }
}
