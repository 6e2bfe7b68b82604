#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "lqgv/field.hpp"
#include "lqgv/measure.hpp"

namespace lqgv {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct WeightedEdge {
  VertexId to = 0;
  double weight = 0.0;
};

/// Lattice graph with edge weights mesh * exp(xi * (f(u) + f(v)) / 2), the
/// LFPP proxy for the sqrt(8/3)-LQG metric. An optional activity mask removes
/// vertices (and their edges), e.g. to restrict to a disk.
class MetricGraph {
 public:
  explicit MetricGraph(const Field& f);
  MetricGraph(const Field& f, std::vector<std::uint8_t> active);

  const Grid& grid() const { return grid_; }
  bool active(VertexId v) const { return active_.empty() || active_[v] != 0; }
  std::span<const std::uint8_t> mask() const { return active_; }
  std::size_t active_count() const { return active_count_; }

  /// Edges out of v. Returns the count written into `out`.
  std::size_t edges(VertexId v, std::array<WeightedEdge, 4>& out) const;

  /// Weight of the lattice edge {u, v}; +inf if there is none.
  double weight(VertexId u, VertexId v) const;
  double min_weight() const { return min_weight_; }

  /// Active vertex on the domain boundary: on the window edge, or next to an
  /// inactive vertex. Never true on an unmasked torus.
  bool on_domain_boundary(VertexId v) const;

 private:
  void build(const Field& f);

  Grid grid_;
  std::vector<std::uint8_t> active_;
  std::size_t active_count_ = 0;
  // Weight of the edge to the +x (east) and +y (north) neighbour; 0 = absent.
  std::vector<double> east_;
  std::vector<double> north_;
  double min_weight_ = kInfinity;
};

MetricGraph build_metric_graph(const Field& f);

/// Vertices within Euclidean distance `radius` of `center`.
std::vector<std::uint8_t> disk_mask(const Grid& grid, Point center, double radius);

/// Reusable scratch for repeated Dijkstra runs that explore few vertices.
/// Distances of untouched vertices stay +inf between runs.
class DijkstraWorkspace {
 public:
  explicit DijkstraWorkspace(std::size_t vertex_count);

  /// Label-setting search from `sources` (all at distance 0), stopping once
  /// the next label exceeds `cutoff`. Returns settled vertices in order of
  /// settlement (distance, then vertex id).
  const std::vector<VertexId>& run(const MetricGraph& g, std::span<const VertexId> sources,
                                   double cutoff = kInfinity);
  double distance(VertexId v) const { return dist_[v]; }

 private:
  void reset();
  std::vector<double> dist_;
  std::vector<std::uint8_t> settled_;
  std::vector<VertexId> touched_;
  std::vector<VertexId> order_;
};

/// Shortest-path distances from src to every vertex (+inf if unreachable).
std::vector<double> distances_from(const MetricGraph& g, VertexId src);

/// Shortest-path length; if `path` is given it receives a geodesic src..dst.
double distance(const MetricGraph& g, VertexId src, VertexId dst,
                std::vector<VertexId>* path = nullptr);

struct MetricBall {
  VertexId center = 0;
  double radius = 0.0;
  std::vector<VertexId> members;  // sorted by vertex id
};

/// {v : distance(center, v) <= s}.
MetricBall metric_ball(const MetricGraph& g, VertexId center, double s);
MetricBall metric_ball(const MetricGraph& g, VertexId center, double s, DijkstraWorkspace& ws);

/// Sum of masses over the ball.
double ball_volume(const AreaMeasure& m, const MetricBall& b);

/// min over u in inner, v in outer of distance(u, v).
double annulus_distance(const MetricGraph& g, std::span<const VertexId> inner,
                        std::span<const VertexId> outer);

/// CSV (src, dst, distance) for the given pairs.
void write_distances_csv(const MetricGraph& g,
                         std::span<const std::pair<VertexId, VertexId>> pairs,
                         const std::filesystem::path& path);

}  // namespace lqgv
