#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lqgv {

/// Raised when a computation leaves the finite floating-point range.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using VertexId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double norm(Point p) { return std::hypot(p.x, p.y); }

enum class Topology : std::uint8_t { PlaneWindow = 0, Torus = 1 };

/// Square lattice of n x n vertices covering an axis-aligned window.
///
/// Plane windows place vertex (i, j) at origin + (i, j) * mesh with
/// mesh = side / (n - 1), so the corner vertices sit on the window corners.
/// Tori identify opposite edges: mesh = side / n and the period is exactly `side`.
/// Vertex ids are row-major: id = j * n + i, with i the column (x) index.
class Grid {
 public:
  Grid(std::size_t n, double side, Topology topology = Topology::PlaneWindow,
       Point origin = {});

  std::size_t n() const { return n_; }
  double side() const { return side_; }
  double mesh() const { return mesh_; }
  Topology topology() const { return topology_; }
  bool is_torus() const { return topology_ == Topology::Torus; }
  Point origin() const { return origin_; }
  std::size_t vertex_count() const { return n_ * n_; }

  VertexId index(std::size_t i, std::size_t j) const {
    return static_cast<VertexId>(j * n_ + i);
  }
  std::size_t column(VertexId v) const { return v % n_; }
  std::size_t row(VertexId v) const { return v / n_; }

  Point position(std::size_t i, std::size_t j) const {
    return {origin_.x + static_cast<double>(i) * mesh_,
            origin_.y + static_cast<double>(j) * mesh_};
  }
  Point position(VertexId v) const { return position(column(v), row(v)); }
  Point center() const;

  /// Vertex on the window edge. Always false on a torus.
  bool on_window_edge(VertexId v) const;

  /// Lattice neighbours of v (4-neighbourhood, wrapped on a torus).
  /// Returns the number written into `out`.
  std::size_t neighbors(VertexId v, std::array<VertexId, 4>& out) const;

  /// b - a, using the minimal image on a torus.
  Point displacement(Point a, Point b) const;
  double distance(Point a, Point b) const { return norm(displacement(a, b)); }

  /// Closest vertex to p (p wrapped into the torus first).
  VertexId nearest_vertex(Point p) const;
  bool contains(Point p) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_;
  double side_;
  double mesh_;
  Topology topology_;
  Point origin_;
};

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

}  // namespace lqgv
