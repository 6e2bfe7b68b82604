#pragma once

#include <filesystem>
#include <vector>

#include "lqgv/voronoi.hpp"
#include "lqgv/walk.hpp"

namespace lqgv {

struct BoundaryOrder {
  /// Boundary cells in counterclockwise order of first appearance, starting at x0.
  std::vector<CellId> cells;
  /// First domain-boundary vertex of x0's arc, where the traversal starts.
  VertexId start_vertex = 0;
};

/// Walks the domain-boundary vertices counterclockwise (by angle about the
/// centroid of the covered vertices) from the start of an arc owned by x0.
BoundaryOrder order_boundary(const Tessellation& t, CellId x0);

/// Probability that the walk from z0 first enters the boundary at each cell
/// (indexed by cell id; zero for interior cells). Solved exactly from the
/// expected-visit equations (D - A)_II u = e_z0 on z0's interior component.
std::vector<double> hitting_probabilities(const CellGraph& g, CellId z0);

/// Boundary cell order[j] -> exp(2 pi i p_j) with p_j the cumulative
/// probability of order[0..j]. Returned positions align with `order`.
std::vector<Point> place_boundary(const std::vector<double>& probs, const std::vector<CellId>& order);

struct HarmonicSolution {
  std::vector<Point> positions;
  /// max over interior cells of |position - mean of neighbour positions|, per coordinate.
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Interior positions solving the discrete Laplace equation with the given
/// boundary values (entries of `positions` at boundary cells). Jacobi-
/// preconditioned conjugate gradients, run until the residual is <= tol.
HarmonicSolution harmonic_extension(const CellGraph& g, std::vector<Point> positions,
                                    double tol = 1e-10);

struct Embedding {
  std::vector<Point> positions;
  std::vector<CellId> boundary_order;
  double residual = 0.0;
  CellId z0 = 0;
  CellId x0 = 0;
  VertexId start_vertex = 0;
  std::vector<double> hitting;
};

/// Full Tutte embedding of a plane tessellation with marked cells z0 (interior)
/// and x0 (boundary).
Embedding tutte_embedding(const Tessellation& t, CellId z0, CellId x0, double tol = 1e-10);

/// Every interior position lies in the convex hull of the boundary positions.
bool maximum_principle_holds(const Embedding& e, const CellGraph& g, double slack = 1e-12);

/// A-priori map from a disk-shaped window to the unit disk: affine rescale,
/// then the disk automorphism sending `z0` to 0 and the boundary point `x0`
/// to angle 0.
class DiskMap {
 public:
  DiskMap(Disk window, Point z0, Point x0);
  Point operator()(Point p) const;

 private:
  Disk window_;
  double ax_ = 0.0;
  double ay_ = 0.0;
  double rot_cos_ = 1.0;
  double rot_sin_ = 0.0;
  Point mobius(Point w) const;
};

struct Displacement {
  double max = 0.0;
  double mean = 0.0;
};

/// Distance between each cell's Tutte position and the a-priori image of its centre.
Displacement embedding_displacement(const Embedding& e, const Tessellation& t, const DiskMap& map);

/// CSV: cell id, tutte_x, tutte_y, apriori_x, apriori_y.
void write_embedding_csv(const Embedding& e, const Tessellation& t, const DiskMap& map,
                         const std::filesystem::path& path);
/// Cells as dots, adjacency as segments, in the unit disk.
void write_embedding_svg(const Embedding& e, const CellGraph& g, const std::filesystem::path& path);

}  // namespace lqgv
