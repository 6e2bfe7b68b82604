#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "lqgv/verify.hpp"

using namespace lqgv;

namespace {

// Inscribed radius and diameter from first principles: distances to every
// non-member lattice point of a padded box, and all pairs of square corners.
SwallowShape brute_shape(const Grid& grid, const std::vector<LatticePoint>& pts) {
  const std::set<LatticePoint> in(pts.begin(), pts.end());
  std::int64_t x0 = pts[0].x, x1 = x0, y0 = pts[0].y, y1 = y0;
  for (const auto& q : pts) {
    x0 = std::min(x0, q.x);
    x1 = std::max(x1, q.x);
    y0 = std::min(y0, q.y);
    y1 = std::max(y1, q.y);
  }
  double best = 0.0;
  for (const auto& q : pts) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::int64_t x = x0 - 1; x <= x1 + 1; ++x) {
      for (std::int64_t y = y0 - 1; y <= y1 + 1; ++y) {
        if (in.contains({x, y})) continue;
        nearest = std::min(nearest, std::hypot(double(x - q.x), double(y - q.y)));
      }
    }
    best = std::max(best, nearest);
  }
  double far = 0.0;
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      far = std::max(far, std::hypot(std::abs(double(a.x - b.x)) + 1.0, std::abs(double(a.y - b.y)) + 1.0));
    }
  }
  return {std::max(0.0, (best - std::sqrt(0.5)) * grid.mesh()), far * grid.mesh()};
}

}  // namespace

TEST_CASE("report json round trip") {
  ExperimentReport r;
  r.name = "demo";
  r.params = {{"n", 64}, {"model", "wn"}};
  r.replicates = 7;
  r.attempted = 20;
  r.excluded = 2;
  r.seed = RngSeed{3, 4};
  r.estimate("x", 1.5, 1.0, 2.0);
  r.check("bounded", 0.5, 0.0, 1.0);
  r.check("open", 3.0, std::numeric_limits<double>::lowest(), 0.0);
  r.finalize();
  r.wall_seconds = 12.0;
  const ExperimentReport back = report_from_json(to_json(r));
  CHECK(back.wall_seconds == 0.0);
  r.wall_seconds = 0.0;
  CHECK(back == r);
  CHECK_FALSE(r.pass);
  CHECK(r.find_check("bounded")->pass);
  CHECK_FALSE(r.find_check("open")->pass);
  CHECK(r.find_estimate("x")->hi == 2.0);
  CHECK(r.find_check("missing") == nullptr);
  CHECK(to_json(r, true).contains("wall_seconds"));
  CHECK(dump_report(r) == dump_report(back));
}

TEST_CASE("finalize enforces the exclusion cap") {
  ExperimentReport r;
  r.check("ok", 1.0, 0.0, 2.0);
  r.attempted = 100;
  r.excluded = 10;
  r.finalize();
  CHECK(r.pass);
  r.excluded = 11;
  r.finalize();
  CHECK_FALSE(r.pass);
  r.check("nan", std::numeric_limits<double>::quiet_NaN(), 0.0, 2.0);
  r.excluded = 0;
  r.finalize();
  CHECK_FALSE(r.pass);
}

TEST_CASE("field model names") {
  for (auto m : {FieldModel::Uniform, FieldModel::WhiteNoise, FieldModel::Truncated, FieldModel::ZeroBoundary}) {
    CHECK(field_model_from_string(to_string(m)) == m);
  }
  CHECK_THROWS(field_model_from_string("gff"));
  CHECK_THROWS(FieldFactory(FieldSpec{FieldModel::ZeroBoundary, 32, 1.0, Topology::Torus}));
}

TEST_CASE("field factory applies singularity and shift") {
  FieldSpec spec{FieldModel::Uniform, 33};
  spec.alpha = 1.0;
  spec.shift = 0.5;
  const FieldFactory factory(spec);
  const Field f = factory.sample(RngSeed{1, 0});
  const Grid g = spec.grid();
  CHECK(f.at(0, 16) == doctest::Approx(0.5 + std::log(2.0)));
  CHECK(f.at(16, 16) == doctest::Approx(0.5 + std::log(2.0 / g.mesh())));
}

TEST_CASE("disk instances and marked cells") {
  const FieldFactory factory(FieldSpec{FieldModel::WhiteNoise, 64});
  InstanceSpec spec;
  spec.field = FieldSpec{FieldModel::WhiteNoise, 64};
  spec.disk = true;
  spec.fixed_points = 40;
  const Instance inst = make_instance(factory, spec, RngSeed{2, 0});
  REQUIRE(inst.disk.has_value());
  CHECK(inst.disk->radius == doctest::Approx(0.5));
  CHECK(inst.measure.total() == doctest::Approx(1.0));
  CHECK(inst.tess.cell_count() == 40);
  for (VertexId v = 0; v < inst.field.grid().vertex_count(); ++v) {
    const bool inside = norm(inst.field.grid().position(v) - inst.disk->center) <= 0.5;
    CHECK(inst.graph.active(v) == inside);
    if (!inside) CHECK(inst.measure[v] == 0.0);
  }
  const auto [z0, x0] = marked_cells(inst, RngSeed{2, 5});
  CHECK_FALSE(inst.tess.graph.is_boundary(z0));
  CHECK(inst.tess.graph.is_boundary(x0));
}

TEST_CASE("swallow shape matches brute force") {
  const Grid g(64, 1.0);
  Rng rng(RngSeed{7, 0}, Purpose::Experiment);
  for (int trial = 0; trial < 20; ++trial) {
    // A random blob grown from the centre.
    std::set<VertexId> blob{g.index(32, 32)};
    std::array<VertexId, 4> nb{};
    const std::size_t target = 5 + rng.below(60);
    while (blob.size() < target) {
      auto it = blob.begin();
      std::advance(it, static_cast<long>(rng.below(blob.size())));
      const std::size_t k = g.neighbors(*it, nb);
      blob.insert(nb[rng.below(k)]);
    }
    const std::vector<VertexId> members(blob.begin(), blob.end());
    const SwallowShape s = swallow_shape(g, members, members.front());
    const SwallowShape b = brute_shape(g, lattice_coordinates(g, members, members.front()));
    CHECK(s.inscribed == doctest::Approx(b.inscribed).epsilon(1e-12));
    CHECK(s.diameter == doctest::Approx(b.diameter).epsilon(1e-12));
    CHECK(s.ratio() <= 0.5);
  }
  // A 5 x 5 block: the centre is 3 steps from the nearest outside vertex.
  std::vector<VertexId> block;
  for (std::size_t j = 10; j < 15; ++j) {
    for (std::size_t i = 10; i < 15; ++i) block.push_back(g.index(i, j));
  }
  const SwallowShape s = swallow_shape(g, block, block.front());
  CHECK(s.inscribed == doctest::Approx((3.0 - std::sqrt(0.5)) * g.mesh()));
  CHECK(s.diameter == doctest::Approx(5.0 * std::sqrt(2.0) * g.mesh()));
}

TEST_CASE("flat annulus crossing is the euclidean l1 gap") {
  AnnulusParams p;
  p.field = FieldSpec{FieldModel::Uniform, 65};
  p.replicates = 2;
  const ExperimentReport r = annulus_crossing(p, RngSeed{1, 0}, 1);
  CHECK(r.pass);
  REQUIRE(r.find_check("uniform_deviation") != nullptr);
}

TEST_CASE("scaling covariance holds to rounding") {
  ScalingParams p;
  p.field = FieldSpec{FieldModel::WhiteNoise, 64};
  const ExperimentReport r = scaling_covariance(p, RngSeed{4, 0}, 1);
  CHECK(r.pass);
  CHECK(r.find_check("mass_relative_error")->value < 1e-12);
}

TEST_CASE("euclidean sanity suite") {
  const ExperimentReport r = euclidean_suite(EuclideanParams{}, RngSeed{1, 0}, 1);
  CHECK(r.pass);
  CHECK(r.find_check("voronoi_mismatches")->value == 0.0);
  CHECK(r.find_check("volume_slope")->value == doctest::Approx(2.0).epsilon(0.075));
}
