#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "madot/geometry.hpp"
#include "madot/oracle.hpp"

using namespace madot;

namespace {

DiracMeasure two_diracs(double w1 = kPi / 2, double w2 = kPi / 2) {
  DiracMeasure mu;
  mu.locations = {Vec2(-0.5, 0.0), Vec2(0.5, 0.0)};
  mu.weights.resize(2);
  mu.weights << w1, w2;
  return mu;
}

DiracMeasure random_measure(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-0.7, 0.7);
  DiracMeasure mu;
  while (static_cast<int>(mu.locations.size()) < k) {
    Vec2 d(pos(rng), pos(rng));
    bool clash = false;
    for (const Vec2& other : mu.locations)
      if ((d - other).norm() < 1e-3) clash = true;
    if (!clash) mu.locations.push_back(d);
  }
  mu.weights = Eigen::VectorXd::Constant(k, kPi / k);
  return mu;
}

}  // namespace

TEST_CASE("support function of disk and square") {
  const ConvexTarget disk = ConvexTarget::unit_disk();
  CHECK(support_function(disk, Vec2(1, 0)) == doctest::Approx(1.0));
  const ConvexTarget square = ConvexTarget::convex_polygon(
      {Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1)});
  CHECK(support_function(square, Vec2(1, 0)) == doctest::Approx(1.0));
  const Vec2 diag = Vec2(1, 1).normalized();
  CHECK(support_function(square, diag) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(support_function(disk, Vec2(1, 1)), ContractViolation);
}

TEST_CASE("support function is positively homogeneous after renormalizing") {
  const ConvexTarget square = ConvexTarget::convex_polygon(
      {Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-0.5, 0.8)});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0, 2 * kPi);
  std::uniform_real_distribution<double> scale(0.1, 5.0);
  for (int i = 0; i < 50; ++i) {
    const double a = angle(rng);
    const Vec2 n(std::cos(a), std::sin(a));
    const double s = scale(rng);
    // H*(s n)/s with s n renormalized to unit equals H*(n).
    const Vec2 scaled = (s * n).normalized();
    CHECK(support_function(square, scaled) == doctest::Approx(support_function(square, n)));
  }
}

TEST_CASE("signed distance") {
  const ConvexTarget disk = ConvexTarget::unit_disk();
  CHECK(signed_distance(disk, Vec2(0, 0)) == doctest::Approx(-1.0));
  CHECK(signed_distance(disk, Vec2(0.5, 0)) == doctest::Approx(-0.5));
  CHECK(signed_distance(disk, Vec2(3, 4)) == doctest::Approx(4.0));
  const ConvexTarget square = ConvexTarget::convex_polygon(
      {Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1)});
  CHECK(signed_distance(square, Vec2(0, 0)) == doctest::Approx(-1.0));
  CHECK(signed_distance(square, Vec2(2, 2)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(signed_distance(square, Vec2(0.25, 0)) == doctest::Approx(-0.75));
}

TEST_CASE("single Dirac cell is the full disk") {
  DiracMeasure mu;
  mu.locations = {Vec2(0, 0)};
  mu.weights = Eigen::VectorXd::Constant(1, kPi);
  const DiskCell cell = laguerre_cell(mu, Eigen::VectorXd::Zero(1), 0);
  CHECK(cell.full_disk);
  CHECK(cell.area == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(cell_area(cell) == doctest::Approx(kPi).epsilon(1e-14));
}

TEST_CASE("equal-height pair splits the disk in half") {
  const DiracMeasure mu = two_diracs();
  const Eigen::VectorXd v = Eigen::VectorXd::Zero(2);
  const DiskCell left = laguerre_cell(mu, v, 0);
  CHECK(left.area == doctest::Approx(kPi / 2).epsilon(1e-13));
  CHECK(cell_area(left) == doctest::Approx(left.area).epsilon(1e-13));
  // Quarter disk from two perpendicular cuts through the origin.
  DiracMeasure quad;
  quad.locations = {Vec2(-0.3, -0.3), Vec2(0.3, -0.3), Vec2(-0.3, 0.3)};
  quad.weights = Eigen::VectorXd::Constant(3, kPi / 3);
  const DiskCell q = laguerre_cell(quad, Eigen::VectorXd::Zero(3), 0);
  CHECK(q.area == doctest::Approx(kPi / 4).epsilon(1e-13));
}

TEST_CASE("tilted two-Dirac cell matches the Monte Carlo oracle") {
  const DiracMeasure mu = two_diracs();
  Eigen::VectorXd v(2);
  v << 0.0, 0.2;
  const DiskCell cell = laguerre_cell(mu, v, 0);
  const McArea mc = mc_area(mu, v, 0, 10000000, 42);
  CHECK(std::abs(cell.area - mc.estimate) <= 3.0 * mc.std_error);
  // The half-plane is x <= 0.2, so the left cell is strictly bigger.
  CHECK(cell.area > kPi / 2);
}

TEST_CASE("mc_area on the full disk has zero error") {
  DiracMeasure mu;
  mu.locations = {Vec2(0.1, -0.2)};
  mu.weights = Eigen::VectorXd::Constant(1, kPi);
  const McArea mc = mc_area(mu, Eigen::VectorXd::Zero(1), 0, 1000000, 3);
  CHECK(mc.estimate == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(mc.std_error == doctest::Approx(0.0));
}

TEST_CASE("symmetric two-Dirac mc matches half disk") {
  const DiracMeasure mu = two_diracs();
  const McArea mc = mc_area(mu, Eigen::VectorXd::Zero(2), 0, 1000000, 11);
  CHECK(std::abs(mc.estimate - kPi / 2) <= 3.0 * mc.std_error);
}

TEST_CASE("degenerate and duplicate Dirac handling") {
  DiracMeasure mu;
  mu.locations = {Vec2(0.25, 0.25), Vec2(0.25, 0.25)};
  mu.weights = Eigen::VectorXd::Constant(2, kPi / 2);
  Eigen::VectorXd equal = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(laguerre_cell(mu, equal, 0), DegenerateInputError);
  Eigen::VectorXd distinct(2);
  distinct << 0.0, 0.5;
  // Lower plane dominates: full disk for the low one, empty for the other.
  CHECK(laguerre_cell(mu, distinct, 0).area == doctest::Approx(kPi));
  CHECK(laguerre_cell(mu, distinct, 1).area == doctest::Approx(0.0));
  CHECK_THROWS_AS(validate(mu), DegenerateInputError);
}

TEST_CASE("cells tile the disk for random configurations") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> hdist(-0.4, 0.4);
  for (int rep = 0; rep < 40; ++rep) {
    const int k = 2 + static_cast<int>(rng() % 19);
    const DiracMeasure mu = random_measure(k, rng);
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v[i] = hdist(rng);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      const DiskCell cell = laguerre_cell(mu, v, i);
      total += cell.area;
      CHECK(cell_area(cell) == doctest::Approx(cell.area).epsilon(1e-12));
      CHECK(cell.area >= 0.0);
      CHECK(cell.area <= kPi + 1e-12);
      // Boundary is a closed chain of edges whose vertices all satisfy the
      // defining half-planes (convexity) and stay in the closed disk.
      Eigen::VectorXd loose = v;
      loose[i] -= 1e-9;  // tolerance for vertices sitting on the bisectors
      const int m = static_cast<int>(cell.edges.size());
      for (int e = 0; e < m; ++e) {
        CHECK((cell.edges[e].b - cell.edges[(e + 1) % m].a).norm() <= 1e-9);
        CHECK(cell.edges[e].a.norm() <= 1.0 + 1e-9);
        CHECK(in_laguerre_cell(mu, loose, i, cell.edges[e].a));
      }
    }
    CHECK(total == doctest::Approx(kPi).epsilon(1e-9));
  }
}

TEST_CASE("cell areas agree with the Monte Carlo oracle on random configurations") {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> hdist(-0.3, 0.3);
  int checked = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int k = 2 + static_cast<int>(rng() % 19);
    const DiracMeasure mu = random_measure(k, rng);
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v[i] = hdist(rng);
    const int cell_id = static_cast<int>(rng() % k);
    const DiskCell cell = laguerre_cell(mu, v, cell_id);
    const McArea mc = mc_area(mu, v, cell_id, 40000, rng());
    // 4 standard errors: 200 independent 3-sigma checks would have a fair
    // chance of one statistical miss.
    CHECK(std::abs(cell.area - mc.estimate) <= 4.0 * std::max(mc.std_error, 1e-4));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("lowering a height grows its cell and shrinks the others") {
  std::mt19937_64 rng(77);
  const DiracMeasure mu = random_measure(6, rng);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(6);
  const Eigen::VectorXd base = cell_areas(mu, v);
  for (int k = 0; k < 6; ++k) {
    Eigen::VectorXd lower = v;
    lower[k] -= 0.05;
    const Eigen::VectorXd after = cell_areas(mu, lower);
    CHECK(after[k] > base[k] - 1e-12);
    for (int j = 0; j < 6; ++j)
      if (j != k) CHECK(after[j] <= base[j] + 1e-12);
  }
}

TEST_CASE("three-Dirac equal heights reproduce the benchmark weights") {
  DiracMeasure mu;
  mu.locations = {Vec2(-0.5, -0.5), Vec2(0.5, -0.5), Vec2(0.5, 0.5)};
  mu.weights = Eigen::VectorXd::Constant(3, kPi / 3);
  const Eigen::VectorXd areas = cell_areas(mu, Eigen::VectorXd::Zero(3));
  // Exact values: the middle cell is a quarter disk, the outer two are
  // 3pi/8 wedges. The benchmark weights were computed with a polygonal disk
  // approximation and sit ~1e-5 off the exact values.
  CHECK(areas[0] == doctest::Approx(3.0 * kPi / 8).epsilon(1e-13));
  CHECK(areas[1] == doctest::Approx(kPi / 4).epsilon(1e-13));
  CHECK(areas[2] == doctest::Approx(3.0 * kPi / 8).epsilon(1e-13));
  CHECK(areas[0] == doctest::Approx(1.17810586).epsilon(2e-5));
  CHECK(areas[1] == doctest::Approx(0.78540476).epsilon(2e-5));
  CHECK(areas[2] == doctest::Approx(1.17810586).epsilon(2e-5));
  CHECK(areas.sum() == doctest::Approx(kPi).epsilon(1e-13));
  for (int k = 0; k < 3; ++k) {
    const McArea mc = mc_area(mu, Eigen::VectorXd::Zero(3), k, 10000000, 900 + k);
    CHECK(std::abs(areas[k] - mc.estimate) <= 3.0 * mc.std_error);
  }
}
