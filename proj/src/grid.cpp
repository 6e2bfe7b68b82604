#include "lqgv/grid.hpp"

#include <algorithm>

namespace lqgv {

Grid::Grid(std::size_t n, double side, Topology topology, Point origin)
    : n_(n), side_(side), mesh_(0.0), topology_(topology), origin_(origin) {
  if (n < 8) throw std::invalid_argument("Grid: need at least 8 vertices per side");
  if (n > 65535) throw std::invalid_argument("Grid: at most 65535 vertices per side");
  if (!(side > 0.0) || !std::isfinite(side)) {
    throw std::invalid_argument("Grid: window side must be positive and finite");
  }
  mesh_ = topology == Topology::Torus ? side / static_cast<double>(n)
                                      : side / static_cast<double>(n - 1);
}

Point Grid::center() const {
  // On a torus the last vertex sits one mesh short of the period.
  const double extent = is_torus() ? side_ - mesh_ : side_;
  return {origin_.x + 0.5 * extent, origin_.y + 0.5 * extent};
}

bool Grid::on_window_edge(VertexId v) const {
  if (is_torus()) return false;
  const std::size_t i = column(v);
  const std::size_t j = row(v);
  return i == 0 || j == 0 || i + 1 == n_ || j + 1 == n_;
}

std::size_t Grid::neighbors(VertexId v, std::array<VertexId, 4>& out) const {
  const std::size_t i = column(v);
  const std::size_t j = row(v);
  std::size_t count = 0;
  if (is_torus()) {
    out[count++] = index((i + 1) % n_, j);
    out[count++] = index((i + n_ - 1) % n_, j);
    out[count++] = index(i, (j + 1) % n_);
    out[count++] = index(i, (j + n_ - 1) % n_);
    return count;
  }
  if (i + 1 < n_) out[count++] = index(i + 1, j);
  if (i > 0) out[count++] = index(i - 1, j);
  if (j + 1 < n_) out[count++] = index(i, j + 1);
  if (j > 0) out[count++] = index(i, j - 1);
  return count;
}

Point Grid::displacement(Point a, Point b) const {
  Point d = b - a;
  if (is_torus()) {
    d.x -= side_ * std::round(d.x / side_);
    d.y -= side_ * std::round(d.y / side_);
  }
  return d;
}

VertexId Grid::nearest_vertex(Point p) const {
  double u = (p.x - origin_.x) / mesh_;
  double w = (p.y - origin_.y) / mesh_;
  const auto nd = static_cast<double>(n_);
  if (is_torus()) {
    u = std::fmod(std::round(u), nd);
    w = std::fmod(std::round(w), nd);
    if (u < 0) u += nd;
    if (w < 0) w += nd;
  } else {
    u = std::clamp(std::round(u), 0.0, nd - 1.0);
    w = std::clamp(std::round(w), 0.0, nd - 1.0);
  }
  return index(static_cast<std::size_t>(u), static_cast<std::size_t>(w));
}

bool Grid::contains(Point p) const {
  if (is_torus()) return std::isfinite(p.x) && std::isfinite(p.y);
  return p.x >= origin_.x && p.x <= origin_.x + side_ && p.y >= origin_.y &&
         p.y <= origin_.y + side_;
}

std::string to_string(Topology t) {
  return t == Topology::Torus ? "torus" : "plane";
}

Topology topology_from_string(const std::string& s) {
  if (s == "torus") return Topology::Torus;
  if (s == "plane" || s == "plane-window") return Topology::PlaneWindow;
  throw std::invalid_argument("unknown topology '" + s + "' (expected plane or torus)");
}

}  // namespace lqgv
