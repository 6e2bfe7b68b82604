#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "lqgv/metric.hpp"

using namespace lqgv;

namespace {

// Bellman-Ford over the explicit edge list, independent of the heap search.
std::vector<double> bellman_ford(const MetricGraph& g, VertexId src) {
  const std::size_t n = g.grid().vertex_count();
  std::vector<double> d(n, kInfinity);
  d[src] = 0.0;
  std::array<WeightedEdge, 4> e{};
  for (std::size_t round = 0; round < n; ++round) {
    bool changed = false;
    for (VertexId v = 0; v < n; ++v) {
      if (!g.active(v) || d[v] == kInfinity) continue;
      const std::size_t k = g.edges(v, e);
      for (std::size_t i = 0; i < k; ++i) {
        if (d[v] + e[i].weight < d[e[i].to]) {
          d[e[i].to] = d[v] + e[i].weight;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return d;
}

Field random_field(const Grid& g, std::uint64_t seed) {
  Rng rng(RngSeed{seed, 0}, Purpose::Experiment);
  std::vector<double> v(g.vertex_count());
  for (double& x : v) x = 1.5 * rng.normal();
  return Field(g, std::move(v), {}, FieldKind::WhiteNoise, RngSeed{seed, 0});
}

}  // namespace

TEST_CASE("edge weights follow the field") {
  const Grid g(8, 7.0);
  std::vector<double> v(64, 0.0);
  v[g.index(1, 1)] = 1.0;
  v[g.index(2, 1)] = -0.5;
  const Field f(g, v, {}, FieldKind::WhiteNoise, {});
  const MetricGraph m(f);
  CHECK(m.weight(g.index(1, 1), g.index(2, 1)) == doctest::Approx(std::exp(kXi * 0.25)));
  CHECK(m.weight(g.index(2, 1), g.index(1, 1)) == doctest::Approx(std::exp(kXi * 0.25)));
  CHECK(m.weight(g.index(0, 0), g.index(0, 1)) == doctest::Approx(1.0));
  CHECK(m.weight(g.index(0, 0), g.index(1, 1)) == kInfinity);
}

TEST_CASE("dijkstra agrees with bellman-ford") {
  const Grid g(12, 1.0);
  const Field f = random_field(g, 1);
  const MetricGraph full(f);
  const MetricGraph masked(f, disk_mask(g, g.center(), 0.45));
  for (const MetricGraph* m : {&full, &masked}) {
    const VertexId src = g.index(6, 5);
    const auto a = distances_from(*m, src);
    const auto b = bellman_ford(*m, src);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (b[v] == kInfinity) {
        CHECK(a[v] == kInfinity);
      } else {
        CHECK(a[v] == doctest::Approx(b[v]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("flat field distances are l1 lattice distances") {
  const Grid g(9, 2.0);
  const MetricGraph m(constant_field(g, 0.0));
  const VertexId a = g.index(1, 2), b = g.index(7, 8);
  std::vector<VertexId> path;
  CHECK(distance(m, a, b, &path) == doctest::Approx(12 * g.mesh()));
  REQUIRE(path.size() == 13);
  CHECK(path.front() == a);
  CHECK(path.back() == b);
  double sum = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) sum += m.weight(path[k - 1], path[k]);
  CHECK(sum == doctest::Approx(12 * g.mesh()));
}

TEST_CASE("geodesic path length equals the distance") {
  const Grid g(16, 1.0, Topology::Torus);
  const MetricGraph m(random_field(g, 2));
  std::vector<VertexId> path;
  const double d = distance(m, g.index(0, 0), g.index(9, 12), &path);
  double sum = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) sum += m.weight(path[k - 1], path[k]);
  CHECK(sum == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("metric balls and volumes") {
  const Grid g(14, 1.0);
  const Field f = random_field(g, 3);
  const MetricGraph m(f);
  const AreaMeasure mu = build_measure(f);
  const VertexId c = g.index(7, 7);
  const auto d = bellman_ford(m, c);
  const double s = 0.4;
  const MetricBall b = metric_ball(m, c, s);
  std::vector<VertexId> expect;
  double volume = 0.0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (d[v] <= s) {
      expect.push_back(v);
      volume += mu[v];
    }
  }
  CHECK(b.members == expect);
  CHECK(ball_volume(mu, b) == doctest::Approx(volume));

  DijkstraWorkspace ws(g.vertex_count());
  const MetricBall again = metric_ball(m, c, s, ws);
  CHECK(again.members == expect);
  CHECK(metric_ball(m, c, 0.0, ws).members == std::vector<VertexId>{c});
}

TEST_CASE("annulus distance is the brute-force minimum") {
  const Grid g(12, 1.0);
  const MetricGraph m(random_field(g, 4));
  const std::vector<VertexId> inner{g.index(5, 5), g.index(6, 5), g.index(6, 6)};
  std::vector<VertexId> outer;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.on_window_edge(v)) outer.push_back(v);
  }
  double best = kInfinity;
  for (VertexId u : inner) {
    const auto d = bellman_ford(m, u);
    for (VertexId v : outer) best = std::min(best, d[v]);
  }
  CHECK(annulus_distance(m, inner, outer) == doctest::Approx(best).epsilon(1e-12));
  CHECK_THROWS(annulus_distance(m, inner, inner));
}

TEST_CASE("domain boundary of a masked disk") {
  const Grid g(21, 1.0);
  const auto mask = disk_mask(g, g.center(), 0.3);
  const MetricGraph m(constant_field(g, 0.0), mask);
  std::array<VertexId, 4> nb{};
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!mask[v]) {
      CHECK_FALSE(m.active(v));
      continue;
    }
    bool next_to_hole = g.on_window_edge(v);
    const std::size_t k = g.neighbors(v, nb);
    for (std::size_t i = 0; i < k; ++i) next_to_hole = next_to_hole || !mask[nb[i]];
    CHECK(m.on_domain_boundary(v) == next_to_hole);
  }
  const MetricGraph torus(constant_field(Grid(8, 1.0, Topology::Torus), 0.0));
  for (VertexId v = 0; v < 64; ++v) CHECK_FALSE(torus.on_domain_boundary(v));
}
