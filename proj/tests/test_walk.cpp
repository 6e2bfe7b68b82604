#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lqgv/stats.hpp"
#include "lqgv/walk.hpp"

using namespace lqgv;

namespace {

CellGraph path_graph(std::size_t n) {
  std::vector<std::pair<CellId, CellId>> e;
  for (CellId k = 0; k + 1 < n; ++k) e.push_back({k, k + 1});
  std::vector<std::uint8_t> boundary(n, 0);
  boundary.front() = boundary.back() = 1;
  return CellGraph(n, e, boundary);
}

// Minimum over every monotone coupling, enumerated path by path.
double brute_frechet(const std::vector<Point>& a, const std::vector<Point>& b, std::size_t i,
                     std::size_t j, double so_far) {
  so_far = std::max(so_far, norm(a[i] - b[j]));
  if (i + 1 == a.size() && j + 1 == b.size()) return so_far;
  double best = kInfinity;
  if (i + 1 < a.size()) best = std::min(best, brute_frechet(a, b, i + 1, j, so_far));
  if (j + 1 < b.size()) best = std::min(best, brute_frechet(a, b, i, j + 1, so_far));
  if (i + 1 < a.size() && j + 1 < b.size()) best = std::min(best, brute_frechet(a, b, i + 1, j + 1, so_far));
  return best;
}

// Exit-angle cdf of Brownian motion started at (r, 0) in the unit disk.
double poisson_cdf(double theta, double r) {
  const double t = theta < std::numbers::pi ? theta : theta - 2.0 * std::numbers::pi;
  return 0.5 + std::atan((1.0 + r) / (1.0 - r) * std::tan(0.5 * t)) / std::numbers::pi;
}

}  // namespace

TEST_CASE("gambler's ruin on a path graph") {
  const CellGraph g = path_graph(11);
  const int walks = 20000;
  int right = 0;
  for (int w = 0; w < walks; ++w) {
    const WalkPath p = run_graph_walk(g, 3, 1000000, true, RngSeed{1, 2}, static_cast<std::uint64_t>(w));
    REQUIRE(p.stopped_at_boundary);
    const CellId end = p.cells.back();
    REQUIRE((end == 0 || end == 10));
    for (std::size_t k = 1; k < p.cells.size(); ++k) {
      REQUIRE(g.adjacent(p.cells[k - 1], p.cells[k]));
    }
    if (end == 10) ++right;
  }
  const double p = 0.3;
  CHECK(std::abs(static_cast<double>(right) / walks - p) < 5.0 * std::sqrt(p * (1 - p) / walks));
}

TEST_CASE("walk bookkeeping") {
  const CellGraph g = path_graph(5);
  const WalkPath free = run_graph_walk(g, 2, 50, false, RngSeed{2, 2});
  CHECK(free.cells.size() == 51);
  CHECK_FALSE(free.stopped_at_boundary);
  const WalkPath again = run_graph_walk(g, 2, 50, false, RngSeed{2, 2});
  CHECK(again.cells == free.cells);

  const std::vector<std::pair<CellId, CellId>> none;
  const CellGraph lone(1, none, {0});
  const WalkPath stuck = run_graph_walk(lone, 0, 10, true, RngSeed{2, 2});
  CHECK(stuck.isolated);
  CHECK(stuck.cells == std::vector<CellId>{0});
}

TEST_CASE("tessellation walks are embedded at cell centres") {
  const Grid g(16, 1.0);
  const Field f = constant_field(g, 0.0);
  const MetricGraph m(f);
  const Tessellation t = tessellate(m, sample_points(build_measure(f), 10, RngSeed{3, 1}));
  const WalkPath w = run_walk(t, g.index(8, 8), 200, true, RngSeed{3, 2});
  REQUIRE(w.cells.size() == w.embedded.size());
  CHECK(w.cells.front() == static_cast<CellId>(t.owner[g.index(8, 8)]));
  for (std::size_t k = 0; k < w.cells.size(); ++k) CHECK(w.embedded[k] == t.center(w.cells[k]));
  CHECK(to_curve(w).vertices == w.embedded);
}

TEST_CASE("brownian exit from the centre is uniform") {
  const Disk d{{0.0, 0.0}, 1.0};
  std::vector<double> angles;
  for (std::uint64_t k = 0; k < 10000; ++k) {
    const PlanarCurve c = sample_brownian({0.0, 0.0}, 1e-4, d, RngSeed{4, 0}, k);
    CHECK(c.source == CurveSource::Brownian);
    CHECK(norm(c.vertices.back()) == doctest::Approx(1.0).epsilon(1e-9));
    angles.push_back(point_angle(c.vertices.back(), d.center));
  }
  CHECK(stats::ks_uniform(angles, 0.0, 2.0 * std::numbers::pi) < 0.03);
}

TEST_CASE("brownian exit from an off-centre start follows the poisson kernel") {
  const Disk d{{0.0, 0.0}, 1.0};
  const double r = 0.5;
  std::vector<double> u;
  for (std::uint64_t k = 0; k < 4000; ++k) {
    const PlanarCurve c = sample_brownian({r, 0.0}, 1e-4, d, RngSeed{5, 0}, k);
    u.push_back(poisson_cdf(point_angle(c.vertices.back(), d.center), r));
  }
  CHECK(stats::ks_uniform(u, 0.0, 1.0) < 0.05);
}

TEST_CASE("angles") {
  CHECK(point_angle({0.0, 1.0}, {0.0, 0.0}) == doctest::Approx(std::numbers::pi / 2));
  CHECK(point_angle({1.0, -1.0}, {1.0, 0.0}) == doctest::Approx(1.5 * std::numbers::pi));
  WalkPath w;
  w.embedded = {{0.0, 0.0}, {-2.0, 1.0}};
  w.stopped_at_boundary = true;
  CHECK(exit_angle(w, Disk{{-1.0, 1.0}, 1.0}) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("discrete frechet distance equals the brute-force coupling minimum") {
  Rng rng(RngSeed{6, 0}, Purpose::Experiment);
  for (int trial = 0; trial < 30; ++trial) {
    PlanarCurve a, b;
    const std::size_t na = 2 + rng.below(5), nb = 2 + rng.below(5);
    for (std::size_t k = 0; k < na; ++k) a.vertices.push_back({rng.normal(), rng.normal()});
    for (std::size_t k = 0; k < nb; ++k) b.vertices.push_back({rng.normal(), rng.normal()});
    CHECK(cmp_distance(a, b) == doctest::Approx(brute_frechet(a.vertices, b.vertices, 0, 0, 0.0)));
    CHECK(cmp_distance(a, b) == doctest::Approx(cmp_distance(b, a)));
  }
  PlanarCurve c;
  c.vertices = {{0, 0}, {1, 0}, {1, 1}};
  CHECK(cmp_distance(c, c) == 0.0);
  PlanarCurve p, q;
  p.vertices = {{0, 0}};
  q.vertices = {{3, 4}};
  CHECK(cmp_distance(p, q) == doctest::Approx(5.0));
}
