#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "lqgv/voronoi.hpp"

using namespace lqgv;

namespace {

Field random_field(const Grid& g, std::uint64_t seed) {
  Rng rng(RngSeed{seed, 0}, Purpose::Experiment);
  std::vector<double> v(g.vertex_count());
  for (double& x : v) x = rng.normal();
  return Field(g, std::move(v), {}, FieldKind::WhiteNoise, RngSeed{seed, 0});
}

// Owner by explicit argmin over per-point distance tables, smallest id on ties.
void brute_force_check(const MetricGraph& m, const PointProcess& p, const Tessellation& t) {
  const Grid& g = m.grid();
  std::vector<std::vector<double>> d;
  for (const auto& x : p.points) d.push_back(distances_from(m, x.vertex));
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!m.active(v)) {
      CHECK(t.owner[v] == kNoOwner);
      continue;
    }
    std::int32_t best = 0;
    for (std::size_t c = 1; c < p.size(); ++c) {
      if (d[c][v] < d[static_cast<std::size_t>(best)][v]) best = static_cast<std::int32_t>(c);
    }
    CHECK(t.owner[v] == best);
    CHECK(t.owner_distance[v] == doctest::Approx(d[static_cast<std::size_t>(best)][v]).epsilon(1e-12));
  }

  std::set<std::pair<CellId, CellId>> edges;
  std::vector<std::uint8_t> boundary(p.size(), 0);
  std::array<VertexId, 4> nb{};
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!m.active(v)) continue;
    const auto a = static_cast<CellId>(t.owner[v]);
    if (m.on_domain_boundary(v)) boundary[a] = 1;
    const std::size_t k = g.neighbors(v, nb);
    for (std::size_t i = 0; i < k; ++i) {
      if (!m.active(nb[i])) continue;
      const auto b = static_cast<CellId>(t.owner[nb[i]]);
      if (a != b) edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  CHECK(t.graph.edge_count() == edges.size());
  for (CellId a = 0; a < p.size(); ++a) {
    CHECK(t.graph.is_boundary(a) == (boundary[a] != 0));
    for (CellId b = a + 1; b < p.size(); ++b) CHECK(t.graph.adjacent(a, b) == edges.contains({a, b}));
    for (VertexId v : t.cell(a)) CHECK(t.owner[v] == static_cast<std::int32_t>(a));
  }
}

}  // namespace

TEST_CASE("tessellation matches brute force on a plane window") {
  const Grid g(20, 1.0);
  const Field f = random_field(g, 1);
  const MetricGraph m(f);
  const PointProcess p = sample_points(build_measure(f), 12, RngSeed{1, 1});
  brute_force_check(m, p, tessellate(m, p));
}

TEST_CASE("tessellation matches brute force on a masked disk and a torus") {
  const Grid g(18, 1.0);
  const Field f = random_field(g, 2);
  const MetricGraph disk(f, disk_mask(g, g.center(), 0.45));
  const PointProcess p = sample_points(build_measure(f).restricted(disk.mask()), 9, RngSeed{2, 1});
  brute_force_check(disk, p, tessellate(disk, p));

  const Grid tg(16, 1.0, Topology::Torus);
  const Field tf = random_field(tg, 3);
  const MetricGraph torus(tf);
  const PointProcess tp = sample_points(build_measure(tf), 7, RngSeed{3, 1});
  const Tessellation t = tessellate(torus, tp);
  brute_force_check(torus, tp, t);
  CHECK(t.graph.boundary_cells().empty());
}

TEST_CASE("ties go to the smaller point id") {
  const Grid g(9, 1.0);
  const MetricGraph m(constant_field(g, 0.0));
  PointProcess p;
  p.points = {{g.index(8, 4), g.position(8, 4)}, {g.index(0, 4), g.position(0, 4)}};
  const Tessellation t = tessellate(m, p);
  CHECK(t.owner[g.index(4, 4)] == 0);
  CHECK(t.owner[g.index(3, 4)] == 1);
  p.points.push_back(p.points[0]);
  CHECK_THROWS(tessellate(m, p));
}

TEST_CASE("cell statistics by hand") {
  const Grid g(9, 2.0);
  const Field f = constant_field(g, 0.0);
  const MetricGraph m(f);
  const AreaMeasure mu = build_measure(f);
  PointProcess p;
  p.points = {{g.index(0, 0), g.position(0, 0)}, {g.index(8, 8), g.position(8, 8)}};
  const Tessellation t = tessellate(m, p);
  const CellStats s = cell_stats(t, mu, m);
  // The anti-diagonal i + j = 8 is equidistant and goes to cell 0: 45 vertices.
  CHECK(t.cell(0).size() == 45);
  CHECK(s.area[0] == doctest::Approx(45 * g.mesh() * g.mesh()));
  CHECK(s.deg[0] == 1);
  CHECK(s.diam[0] == doctest::Approx(std::hypot(2.0, 2.0)));
  CHECK(s.bh_radius[0] == doctest::Approx(2.0));
  CHECK(s.diam[1] == doctest::Approx(std::hypot(1.75, 1.75)));
  CHECK(moment_statistic(t, s, g.index(1, 1)) == doctest::Approx(8.0 / s.area[0]));

  PointProcess one;
  one.points = {{g.index(4, 4), g.position(4, 4)}};
  const Tessellation t1 = tessellate(m, one);
  CHECK(moment_statistic(t1, cell_stats(t1, mu, m), g.index(0, 0)) == 0.0);
}

TEST_CASE("convex hull drops interior and collinear points") {
  const std::vector<LatticePoint> pts{{0, 0}, {1, 0}, {2, 0}, {2, 2}, {1, 1}, {0, 2}, {0, 1}};
  const auto h = convex_hull(pts);
  REQUIRE(h.size() == 4);
  long long area2 = 0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto& a = h[k];
    const auto& b = h[(k + 1) % h.size()];
    area2 += a.x * b.y - b.x * a.y;
  }
  CHECK(area2 == 8);
  CHECK(std::set<LatticePoint>(h.begin(), h.end()) ==
        std::set<LatticePoint>{{0, 0}, {2, 0}, {2, 2}, {0, 2}});
}

TEST_CASE("torus coordinates unwrap across the seam") {
  const Grid g(8, 1.0, Topology::Torus);
  const std::vector<VertexId> set{g.index(7, 0), g.index(0, 0), g.index(1, 0), g.index(0, 7)};
  const auto c = lattice_coordinates(g, set, g.index(0, 0));
  CHECK(c == std::vector<LatticePoint>{{-1, 0}, {0, 0}, {1, 0}, {0, -1}});
  CHECK(vertex_set_diameter(g, set, g.index(0, 0)) == doctest::Approx(2.0 * g.mesh()));
}

TEST_CASE("single cell and partition areas") {
  const Grid g(12, 1.0);
  const Field f = random_field(g, 5);
  const MetricGraph m(f);
  const AreaMeasure mu = build_measure(f);
  PointProcess one;
  one.points = {{g.index(3, 4), g.position(3, 4)}};
  const Tessellation t1 = tessellate(m, one);
  const CellStats s1 = cell_stats(t1, mu, m);
  CHECK(s1.area[0] == doctest::Approx(g.mesh() * g.mesh() * 144));
  CHECK(s1.diam[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(s1.deg[0] == 0);
  CHECK(t1.graph.edge_count() == 0);

  const PointProcess p = sample_points(mu, 9, RngSeed{5, 1});
  const Tessellation t = tessellate(m, p);
  const CellStats s = cell_stats(t, mu, m);
  double area = 0.0;
  for (CellId c = 0; c < t.cell_count(); ++c) {
    area += s.area[c];
    // B_H radius against distances recomputed from the centre alone.
    const auto d = distances_from(m, t.center_vertex(c));
    double far = 0.0;
    for (VertexId v : t.cell(c)) far = std::max(far, d[v]);
    CHECK(s.bh_radius[c] == doctest::Approx(far).epsilon(1e-12));
    CHECK(t.owner[t.center_vertex(c)] == static_cast<std::int32_t>(c));
  }
  CHECK(area == doctest::Approx(g.mesh() * g.mesh() * 144));
}
