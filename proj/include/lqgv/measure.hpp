#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "lqgv/field.hpp"

namespace lqgv {

/// Regularised sqrt(8/3)-LQG area measure: one mass per vertex cell,
///   mass(v) = mesh^{2 + gamma^2/2} * exp(gamma * f(v)).
class AreaMeasure {
 public:
  /// Wraps precomputed masses. Masses must be finite and non-negative.
  AreaMeasure(Grid grid, std::vector<double> mass);

  const Grid& grid() const { return grid_; }
  std::span<const double> masses() const { return mass_; }
  double operator[](VertexId v) const { return mass_[v]; }
  double total() const { return total_; }
  /// Number of vertices with positive mass.
  std::size_t support_size() const { return support_; }

  /// Same masses with every vertex outside `mask` set to zero.
  AreaMeasure restricted(std::span<const std::uint8_t> mask) const;
  /// Masses rescaled so the total equals `target`. Equivalent to shifting the
  /// field by log(target / total) / gamma.
  AreaMeasure normalized(double target = 1.0) const;

  /// Vertex drawn with probability proportional to its mass.
  VertexId sample_vertex(Rng& rng) const;

 private:
  Grid grid_;
  std::vector<double> mass_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
  std::size_t support_ = 0;
};

AreaMeasure build_measure(const Field& f);

struct MarkedVertex {
  VertexId vertex = 0;
  Point position;
};

struct PointProcess {
  std::vector<MarkedVertex> points;
  double lambda = 0.0;
  RngSeed seed;

  std::size_t size() const { return points.size(); }
};

/// Poisson process with intensity lambda * mu, snapped to vertices. The count
/// is Poisson(lambda * total); locations are i.i.d. from mu, and a location
/// already taken is redrawn so the centres are distinct.
PointProcess sample_poisson(const AreaMeasure& m, double lambda, RngSeed seed);

/// Exactly `count` distinct vertices drawn from mu in the same way.
PointProcess sample_points(const AreaMeasure& m, std::size_t count, RngSeed seed);

/// CSV with columns index,i,j,x,y.
void write_points_csv(const PointProcess& p, const Grid& grid, const std::filesystem::path& path);

}  // namespace lqgv
