#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "lqgv/tutte.hpp"

using namespace lqgv;

namespace {

Field random_field(const Grid& g, std::uint64_t seed) {
  Rng rng(RngSeed{seed, 0}, Purpose::Experiment);
  std::vector<double> v(g.vertex_count());
  for (double& x : v) x = 0.7 * rng.normal();
  return Field(g, std::move(v), {}, FieldKind::WhiteNoise, RngSeed{seed, 0});
}

Tessellation disk_tessellation(std::uint64_t seed, std::size_t cells) {
  const Grid g(41, 1.0);
  const Field f = random_field(g, seed);
  const MetricGraph m(f, disk_mask(g, g.center(), 0.5));
  const AreaMeasure mu = build_measure(f).restricted(m.mask());
  return tessellate(m, sample_points(mu, cells, RngSeed{seed, 1}));
}

// Dense oracle: rows of (D - A)_II^{-1} A_IB, i.e. the harmonic measure of every
// boundary cell seen from every interior cell.
struct DenseHarmonic {
  std::vector<CellId> interior, boundary;
  std::vector<int> slot;
  Eigen::MatrixXd x;
};

DenseHarmonic dense_harmonic(const CellGraph& g) {
  DenseHarmonic h;
  h.slot.assign(g.size(), -1);
  for (CellId c = 0; c < g.size(); ++c) {
    auto& list = g.is_boundary(c) ? h.boundary : h.interior;
    h.slot[c] = static_cast<int>(list.size());
    list.push_back(c);
  }
  const auto ni = static_cast<int>(h.interior.size()), nb = static_cast<int>(h.boundary.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(ni, ni), rhs = Eigen::MatrixXd::Zero(ni, nb);
  for (int r = 0; r < ni; ++r) {
    const CellId c = h.interior[r];
    lap(r, r) = static_cast<double>(g.degree(c));
    for (CellId d : g.neighbors(c)) {
      if (g.is_boundary(d)) {
        rhs(r, h.slot[d]) += 1.0;
      } else {
        lap(r, h.slot[d]) -= 1.0;
      }
    }
  }
  h.x = lap.fullPivLu().solve(rhs);
  return h;
}

CellId interior_center_cell(const Tessellation& t) {
  return static_cast<CellId>(t.owner[t.grid.index(20, 20)]);
}

}  // namespace

TEST_CASE("hitting probabilities match a dense solve") {
  const Tessellation t = disk_tessellation(1, 80);
  const CellId z0 = interior_center_cell(t);
  REQUIRE_FALSE(t.graph.is_boundary(z0));
  const auto p = hitting_probabilities(t.graph, z0);
  const DenseHarmonic h = dense_harmonic(t.graph);
  double total = 0.0;
  for (CellId c = 0; c < t.graph.size(); ++c) {
    total += p[c];
    if (t.graph.is_boundary(c)) {
      CHECK(p[c] == doctest::Approx(h.x(h.slot[z0], h.slot[c])).epsilon(1e-9));
    } else {
      CHECK(p[c] == 0.0);
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("harmonic extension matches a dense solve") {
  const Tessellation t = disk_tessellation(2, 70);
  const DenseHarmonic h = dense_harmonic(t.graph);
  Rng rng(RngSeed{2, 0}, Purpose::Experiment);
  std::vector<Point> pos(t.graph.size());
  Eigen::MatrixXd pb(static_cast<int>(h.boundary.size()), 2);
  for (std::size_t k = 0; k < h.boundary.size(); ++k) {
    pos[h.boundary[k]] = {rng.normal(), rng.normal()};
    pb(static_cast<int>(k), 0) = pos[h.boundary[k]].x;
    pb(static_cast<int>(k), 1) = pos[h.boundary[k]].y;
  }
  const HarmonicSolution s = harmonic_extension(t.graph, pos, 1e-12);
  CHECK(s.residual <= 1e-12);
  const Eigen::MatrixXd expect = h.x * pb;
  for (std::size_t k = 0; k < h.interior.size(); ++k) {
    const Point q = s.positions[h.interior[k]];
    CHECK(q.x == doctest::Approx(expect(static_cast<int>(k), 0)).epsilon(1e-8));
    CHECK(q.y == doctest::Approx(expect(static_cast<int>(k), 1)).epsilon(1e-8));
  }
  for (CellId b : h.boundary) CHECK(s.positions[b] == pos[b]);
}

TEST_CASE("boundary placement uses cumulative probabilities") {
  const std::vector<double> probs{0.0, 0.25, 0.5, 0.0, 0.25};
  const std::vector<CellId> order{2, 4, 1};
  const auto pos = place_boundary(probs, order);
  REQUIRE(pos.size() == 3);
  const double cum[] = {0.5, 0.75, 1.0};
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(pos[k].x == doctest::Approx(std::cos(2.0 * std::numbers::pi * cum[k])));
    CHECK(pos[k].y == doctest::Approx(std::sin(2.0 * std::numbers::pi * cum[k])));
  }
}

TEST_CASE("embedding is rigid under a change of boundary root") {
  const Tessellation t = disk_tessellation(3, 60);
  const CellId z0 = interior_center_cell(t);
  const auto boundary = t.graph.boundary_cells();
  REQUIRE(boundary.size() > 3);
  const Embedding a = tutte_embedding(t, z0, boundary[0]);
  CHECK(a.boundary_order.front() == boundary[0]);
  CHECK(std::set<CellId>(a.boundary_order.begin(), a.boundary_order.end()) ==
        std::set<CellId>(boundary.begin(), boundary.end()));
  CHECK(a.boundary_order.size() == boundary.size());
  CHECK(maximum_principle_holds(a, t.graph));

  // Re-rooting at another boundary cell rotates every position by one angle.
  const CellId x1 = a.boundary_order[a.boundary_order.size() / 2];
  const Embedding b = tutte_embedding(t, z0, x1);
  const double turn = std::atan2(b.positions[x1].y, b.positions[x1].x) -
                      std::atan2(a.positions[x1].y, a.positions[x1].x);
  const double c = std::cos(turn), s = std::sin(turn);
  for (CellId k = 0; k < t.graph.size(); ++k) {
    const Point p = a.positions[k];
    CHECK(b.positions[k].x == doctest::Approx(c * p.x - s * p.y).epsilon(1e-8));
    CHECK(b.positions[k].y == doctest::Approx(s * p.x + c * p.y).epsilon(1e-8));
  }

  Embedding broken = a;
  broken.positions[z0] = {1.5, 0.0};
  CHECK_FALSE(maximum_principle_holds(broken, t.graph));
}

TEST_CASE("a-priori disk map") {
  const Disk w{{2.0, 3.0}, 0.5};
  const Point z0{2.1, 3.2}, x0{2.0, 2.5};
  const DiskMap map(w, z0, x0);
  const Point a = map(z0);
  CHECK(norm(a) < 1e-12);
  const Point b = map(x0);
  CHECK(b.x == doctest::Approx(1.0));
  CHECK(b.y == doctest::Approx(0.0).epsilon(1e-12));
  for (double th : {0.3, 1.9, 4.4}) {
    CHECK(norm(map({2.0 + 0.5 * std::cos(th), 3.0 + 0.5 * std::sin(th)})) == doctest::Approx(1.0));
  }
  CHECK(norm(map({2.3, 2.9})) < 1.0);
}
