#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lqgv/measure.hpp"
#include "lqgv/metric.hpp"

namespace lqgv {

using CellId = std::uint32_t;
inline constexpr std::int32_t kNoOwner = -1;

/// Simple undirected graph on cells in CSR form, with a boundary flag per cell.
class CellGraph {
 public:
  CellGraph() = default;
  /// Builds from an edge list; duplicate and reversed edges are merged,
  /// self-loops rejected.
  CellGraph(std::size_t cell_count, std::span<const std::pair<CellId, CellId>> edges,
            std::vector<std::uint8_t> boundary);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const CellId> neighbors(CellId c) const {
    return {adjacency_.data() + offsets_[c], adjacency_.data() + offsets_[c + 1]};
  }
  std::size_t degree(CellId c) const { return offsets_[c + 1] - offsets_[c]; }
  bool adjacent(CellId a, CellId b) const;
  bool is_boundary(CellId c) const { return boundary_[c] != 0; }
  std::span<const std::uint8_t> boundary_flags() const { return boundary_; }
  std::vector<CellId> boundary_cells() const;
  std::size_t edge_count() const { return adjacency_.size() / 2; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<CellId> adjacency_;
  std::vector<std::uint8_t> boundary_;
};

/// Voronoi tessellation of a point process under a MetricGraph distance.
/// Cell ids are point indices. Inactive (masked) vertices have owner kNoOwner.
struct Tessellation {
  Grid grid;
  PointProcess points;
  std::vector<std::int32_t> owner;
  std::vector<double> owner_distance;
  CellGraph graph;
  /// Vertices of each cell, CSR by cell id, ascending vertex ids.
  std::vector<std::size_t> cell_offsets;
  std::vector<VertexId> cell_vertices;

  std::size_t cell_count() const { return points.size(); }
  std::span<const VertexId> cell(CellId c) const {
    return {cell_vertices.data() + cell_offsets[c], cell_vertices.data() + cell_offsets[c + 1]};
  }
  Point center(CellId c) const { return points.points[c].position; }
  VertexId center_vertex(CellId c) const { return points.points[c].vertex; }
};

/// Multi-source Dijkstra assignment; equidistant vertices go to the smallest
/// point id. Cells are adjacent iff a lattice edge joins them. Boundary cells
/// own at least one domain-boundary vertex (window edge, or next to a masked
/// vertex); a torus without a mask has none.
Tessellation tessellate(const MetricGraph& g, const PointProcess& p);

struct CellStats {
  std::vector<double> diam;         // Euclidean diameter of the cell's vertices
  std::vector<double> area;         // mesh^2 * vertex count
  std::vector<std::size_t> deg;
  std::vector<double> bh_radius;    // max owner distance over the cell
  std::vector<double> bh_volume;    // mu of the metric ball B_H
  std::vector<double> bh_area;      // mesh^2 * |B_H|
};

CellStats cell_stats(const Tessellation& t, const AreaMeasure& m, const MetricGraph& g);

struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  auto operator<=>(const LatticePoint&) const = default;
};

/// Integer lattice coordinates (column, row) of a vertex set, in input order.
/// On a torus a connected set is unwrapped by a breadth-first walk from `anchor`.
std::vector<LatticePoint> lattice_coordinates(const Grid& grid, std::span<const VertexId> vertices,
                                              VertexId anchor);

/// Convex hull (counterclockwise, no collinear points) of lattice points.
std::vector<LatticePoint> convex_hull(std::vector<LatticePoint> pts);

/// Euclidean diameter of a vertex set (unwrapped around `anchor` on a torus).
double vertex_set_diameter(const Grid& grid, std::span<const VertexId> vertices, VertexId anchor);

/// diam^2 * deg / area of the cell owning origin_vertex; 0 when deg = 0.
double moment_statistic(const Tessellation& t, const CellStats& stats, VertexId origin_vertex);

/// One replicate's contribution to both sides of the mass-transport identity
///   E[diam(H_0)^2 deg(H_0) / area(H_0)] = E[sum_{H : 0 in B_H} diam(H)^2 deg(H) / area(B_H)]
/// with the origin at `origin_vertex`.
struct MassTransportSample {
  double lhs = 0.0;
  double rhs = 0.0;
};
MassTransportSample mass_transport_sample(const Tessellation& t, const CellStats& stats,
                                          const MetricGraph& g, VertexId origin_vertex);

struct MassTransportSides {
  double lhs_mean = 0.0;
  double lhs_lo = 0.0;
  double lhs_hi = 0.0;
  double rhs_mean = 0.0;
  double rhs_lo = 0.0;
  double rhs_hi = 0.0;
  std::size_t replicates = 0;
  bool overlap() const { return lhs_lo <= rhs_hi && rhs_lo <= lhs_hi; }
};
/// Means and normal-approximation 95% intervals over replicates.
MassTransportSides mass_transport_sides(std::span<const MassTransportSample> samples);

/// CSV: point id, x, y, diam, area, deg, bh_radius, bh_volume.
void write_cell_stats_csv(const Tessellation& t, const CellStats& s,
                          const std::filesystem::path& path);

}  // namespace lqgv
