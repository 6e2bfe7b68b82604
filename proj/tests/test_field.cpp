#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "lqgv/field.hpp"
#include "lqgv/stats.hpp"

using namespace lqgv;

namespace {

// pi * int_a^b p_B(s; 0, 0) ds from the Bessel series, with zeros from boost.
double killed_variance_series(double a, double b, double radius) {
  double total = 0.0;
  for (int k = 1; k <= 2000; ++k) {
    const double j = boost::math::cyl_bessel_j_zero(0.0, k);
    const double j1 = boost::math::cyl_bessel_j(1, j);
    const double rate = j * j / (2.0 * radius * radius);
    total += (std::exp(-rate * a) - std::exp(-rate * b)) / rate / (radius * radius * j1 * j1);
  }
  return total;
}

double killed_density_series(double s, double radius) {
  double total = 0.0;
  for (int k = 1; k <= 2000; ++k) {
    const double j = boost::math::cyl_bessel_j_zero(0.0, k);
    const double j1 = boost::math::cyl_bessel_j(1, j);
    total += std::exp(-j * j * s / (2.0 * radius * radius)) /
             (std::numbers::pi * radius * radius * j1 * j1);
  }
  return total;
}

}  // namespace

TEST_CASE("dirichlet gff covariance is the inverse laplacian") {
  const std::size_t m = 3;
  const int d = static_cast<int>(m * m);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const int a = static_cast<int>(j * m + i);
      lap(a, a) = 4.0;
      if (i + 1 < m) lap(a, a + 1) = lap(a + 1, a) = -1.0;
      if (j + 1 < m) lap(a, a + static_cast<int>(m)) = lap(a + static_cast<int>(m), a) = -1.0;
    }
  }
  const Eigen::MatrixXd exact = lap.inverse();

  Rng rng(RngSeed{3, 0}, Purpose::Experiment);
  const int samples = 40000;
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
  for (int s = 0; s < samples; ++s) {
    const auto x = dirichlet_gff_interior(m, rng, 1.0);
    REQUIRE(x.size() == m * m);
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), d);
    second += v * v.transpose();
  }
  second /= samples;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const double se = std::sqrt((exact(a, a) * exact(b, b) + exact(a, b) * exact(a, b)) / samples);
      CHECK(std::abs(second(a, b) - exact(a, b)) < 5.0 * se);
    }
  }

  Rng one(RngSeed{4, 0}, Purpose::Experiment);
  double ss = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double x = dirichlet_gff_interior(1, one, 1.0)[0];
    ss += x * x;
  }
  CHECK(std::abs(ss / samples - 0.25) < 5.0 * 0.25 * std::sqrt(2.0 / samples));
}

TEST_CASE("zero-boundary field vanishes on the window edge") {
  const Grid g(33, 1.0);
  const Field f = sample_zero_boundary_field(g, RngSeed{1, 0});
  CHECK(f.kind() == FieldKind::ZeroBoundary);
  double interior = 0.0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.on_window_edge(v)) {
      CHECK(f[v] == 0.0);
    } else {
      interior += std::abs(f[v]);
    }
  }
  CHECK(interior > 0.0);
  CHECK_THROWS(sample_zero_boundary_field(Grid(16, 1.0, Topology::Torus), RngSeed{1, 0}));
}

TEST_CASE("white-noise band has variance log(t_hi / t_lo)") {
  const Grid g(64, 1.0);
  const WhiteNoiseSampler sampler(g, 0.05, 0.2);
  std::vector<double> x;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Field f = sampler.sample(RngSeed{s, 0});
    // Four vertices 0.4 apart: well beyond the band's correlation length.
    for (std::size_t i : {12, 38}) {
      for (std::size_t j : {12, 38}) x.push_back(f.at(i, j));
    }
  }
  const double expect = std::log(4.0);
  const double n = static_cast<double>(x.size());
  CHECK(std::abs(stats::mean(x)) < 5.0 * std::sqrt(expect / n));
  CHECK(std::abs(stats::variance(x) - expect) < 5.0 * expect * std::sqrt(2.0 / n));
}

TEST_CASE("band and cutoff fields are coupled through one white noise") {
  const Grid g(48, 1.0);
  const RngSeed seed{11, 0};
  const Field fine = sample_wn_field(g, 0.05, seed);
  const Field coarse = sample_wn_field(g, 0.2, seed);
  const Field band = sample_wn_band(g, 0.05, 0.2, seed);
  CHECK(fine.scales() == ScaleRange{0.05, 1.0});
  CHECK(band.scales() == ScaleRange{0.05, 0.2});
  double worst = 0.0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    worst = std::max(worst, std::abs(fine[v] - coarse[v] - band[v]));
  }
  CHECK(worst < 1e-9);
  CHECK_THROWS(sample_wn_field(g, 0.1 * minimum_cutoff(g), seed));
}

TEST_CASE("shifted and constant fields") {
  const Grid g(8, 1.0);
  const Field f = constant_field(g, 0.25);
  const Field h = f.shifted(-1.0);
  for (double v : h.values()) CHECK(v == doctest::Approx(-0.75));
  CHECK(h.grid() == g);
  CHECK(f.interpolate({0.3, 0.7}) == doctest::Approx(0.25));
}

TEST_CASE("bessel zeros and killed return density") {
  const auto zeros = heat::bessel_j0_zeros();
  REQUIRE(zeros.size() >= 50);
  for (std::size_t k = 0; k < 50; ++k) {
    CHECK(zeros[k] == doctest::Approx(boost::math::cyl_bessel_j_zero(0.0, static_cast<int>(k + 1))).epsilon(1e-12));
  }
  const double r = kTruncationRadius;
  for (double s : {0.001, 0.003, 0.01, 0.05}) {
    CHECK(heat::killed_return_density(s, r) == doctest::Approx(killed_density_series(s, r)).epsilon(1e-9));
  }
  // Far from the boundary in time the killing is invisible.
  const double s = 1e-5;
  CHECK(heat::killed_return_density(s, r) == doctest::Approx(1.0 / (2.0 * std::numbers::pi * s)).epsilon(1e-9));
  CHECK(heat::killed_kernel(0.01, r, r) == 0.0);
}

TEST_CASE("truncated field variance and independence") {
  const Grid g(128, 1.0);
  const double t_min = g.mesh();
  const TruncatedSampler sampler(g, t_min);
  const double expect = killed_variance_series(t_min * t_min, 1.0, kTruncationRadius);
  CHECK(sampler.variance() == doctest::Approx(expect).epsilon(1e-6));

  std::vector<double> x, a, b;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Field f = sampler.sample(RngSeed{s, 0});
    // Vertices 0.2 apart (26 steps of 1/127) use disjoint noise.
    for (std::size_t i = 12; i < 128; i += 26) {
      for (std::size_t j = 12; j < 128; j += 26) {
        x.push_back(f.at(i, j));
        if (i + 26 < 128) {
          a.push_back(f.at(i, j));
          b.push_back(f.at(i + 26, j));
        }
      }
    }
  }
  const double n = static_cast<double>(x.size());
  CHECK(std::abs(stats::variance(x) - expect) < 5.0 * expect * std::sqrt(2.0 / n));
  double cov = 0.0;
  const double ma = stats::mean(a), mb = stats::mean(b);
  for (std::size_t k = 0; k < a.size(); ++k) cov += (a[k] - ma) * (b[k] - mb);
  const double corr = cov / static_cast<double>(a.size()) / std::sqrt(stats::variance(a) * stats::variance(b));
  CHECK(std::abs(corr) < 5.0 / std::sqrt(static_cast<double>(a.size())));
}

TEST_CASE("log singularity values and clamping") {
  const Grid g(11, 1.0);
  const Field zero = constant_field(g, 0.0);
  const Point z0{0.5, 0.5};
  const Field f = add_log_singularity(zero, 1.5, z0);
  CHECK(f.at(5, 5) == doctest::Approx(1.5 * std::log(2.0 / g.mesh())));
  CHECK(f.at(8, 5) == doctest::Approx(1.5 * std::log(1.0 / 0.3)));
  CHECK(f.at(0, 0) == doctest::Approx(1.5 * std::log(1.0 / std::hypot(0.5, 0.5))));
  CHECK_THROWS_AS(add_log_singularity(zero, kQ, z0), std::invalid_argument);
  CHECK_NOTHROW(add_log_singularity(zero, 2.0, z0));
}

TEST_CASE("circle averages obey the mean value property") {
  const Grid g(257, 1.0);
  const Field zero = constant_field(g, 0.0);
  const Point c{0.5, 0.5};
  const Field centred = add_log_singularity(zero, 1.0, c);
  CHECK(circle_average(centred, c, 0.2) == doctest::Approx(std::log(1.0 / 0.2)).epsilon(1e-3));

  const Point z0{0.15, 0.2};
  const Field off = add_log_singularity(zero, 1.0, z0);
  const Point z{0.6, 0.55};
  CHECK(circle_average(off, z, 0.2) == doctest::Approx(std::log(1.0 / norm(z - z0))).epsilon(1e-3));
  CHECK_THROWS(circle_average(off, z, 0.5));
}

TEST_CASE("field cache round trip") {
  const Grid g(16, 2.0, Topology::Torus);
  const Field f = sample_wn_field(g, 0.1, RngSeed{5, 9});
  const auto path = std::filesystem::temp_directory_path() / "lqgv_test_field.lqgf";
  write_field_cache(f, path);
  const Field r = read_field_cache(path);
  std::filesystem::remove(path);
  CHECK(r.grid() == g);
  CHECK(r.kind() == f.kind());
  CHECK(r.scales().t_min == f.scales().t_min);
  CHECK(r.seed() == f.seed());
  REQUIRE(r.values().size() == f.values().size());
  for (std::size_t k = 0; k < f.values().size(); ++k) CHECK(r.values()[k] == f.values()[k]);
}
