#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lqgv/voronoi.hpp"

namespace lqgv {

struct Disk {
  Point center;
  double radius = 1.0;
};

struct WalkPath {
  std::vector<CellId> cells;
  /// Cell centres, unwrapped along the path on a torus.
  std::vector<Point> embedded;
  bool stopped_at_boundary = false;
  /// The start cell had no neighbour, so the walk could not move.
  bool isolated = false;
  RngSeed seed;
};

/// Simple random walk on a cell graph from `start`. Steps are uniform over
/// neighbours; the walk stops on entering a boundary cell (when requested) or
/// after max_steps steps. `index` selects one of many walks sharing a seed.
WalkPath run_graph_walk(const CellGraph& graph, CellId start, std::size_t max_steps,
                        bool stop_at_boundary, RngSeed seed, std::uint64_t index = 0);

/// Walk on the tessellation from the cell owning start_vertex, embedded at
/// the cell centres.
WalkPath run_walk(const Tessellation& t, VertexId start_vertex, std::size_t max_steps,
                  bool stop_at_boundary, RngSeed seed, std::uint64_t index = 0);

enum class CurveSource : std::uint8_t { Walk = 0, Brownian = 1 };

struct PlanarCurve {
  std::vector<Point> vertices;
  CurveSource source = CurveSource::Walk;
};

PlanarCurve to_curve(const WalkPath& w);

/// Planar Brownian motion from `start` with time step dt, stopped on leaving
/// the disk; the exit point is interpolated linearly within the last step.
PlanarCurve sample_brownian(Point start, double dt, Disk domain, RngSeed seed,
                            std::uint64_t index = 0, std::size_t max_steps = 100000000);

/// Discrete Frechet distance (monotone couplings of the vertex sequences).
double cmp_distance(const PlanarCurve& a, const PlanarCurve& b);

/// Angle in [0, 2 pi) of the terminal point about the disk centre.
double exit_angle(const WalkPath& p, Disk domain);
double point_angle(Point p, Point center);

/// CSV: step, cell id, x, y.
void write_walk_csv(const WalkPath& w, const std::filesystem::path& path);

}  // namespace lqgv
