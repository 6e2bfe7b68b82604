#include "lqgv/walk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace lqgv {

WalkPath run_graph_walk(const CellGraph& graph, CellId start, std::size_t max_steps,
                        bool stop_at_boundary, RngSeed seed, std::uint64_t index) {
  if (start >= graph.size()) throw std::invalid_argument("run_walk: start cell out of range");
  WalkPath w;
  w.seed = seed;
  w.cells.push_back(start);
  if (stop_at_boundary && graph.is_boundary(start)) {
    w.stopped_at_boundary = true;
    return w;
  }
  if (graph.degree(start) == 0) {
    w.isolated = true;
    return w;
  }
  Rng rng(seed, Purpose::Walk, index);
  CellId here = start;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const auto nb = graph.neighbors(here);
    here = nb[rng.below(nb.size())];
    w.cells.push_back(here);
    if (stop_at_boundary && graph.is_boundary(here)) {
      w.stopped_at_boundary = true;
      break;
    }
  }
  return w;
}

WalkPath run_walk(const Tessellation& t, VertexId start_vertex, std::size_t max_steps,
                  bool stop_at_boundary, RngSeed seed, std::uint64_t index) {
  if (start_vertex >= t.owner.size() || t.owner[start_vertex] == kNoOwner) {
    throw std::invalid_argument("run_walk: start vertex is not covered by the tessellation");
  }
  if (stop_at_boundary && t.cell_count() < 2) {
    throw std::invalid_argument("run_walk: need at least two cells to stop at the boundary");
  }
  WalkPath w = run_graph_walk(t.graph, static_cast<CellId>(t.owner[start_vertex]), max_steps,
                              stop_at_boundary, seed, index);
  w.embedded.reserve(w.cells.size());
  w.embedded.push_back(t.center(w.cells.front()));
  for (std::size_t k = 1; k < w.cells.size(); ++k) {
    const Point step = t.grid.displacement(t.center(w.cells[k - 1]), t.center(w.cells[k]));
    w.embedded.push_back(w.embedded.back() + step);
  }
  return w;
}

PlanarCurve to_curve(const WalkPath& w) { return {w.embedded, CurveSource::Walk}; }

PlanarCurve sample_brownian(Point start, double dt, Disk domain, RngSeed seed, std::uint64_t index,
                            std::size_t max_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_brownian: dt must be positive");
  const double r2 = domain.radius * domain.radius;
  auto inside = [&](Point p) {
    const Point d = p - domain.center;
    return d.x * d.x + d.y * d.y < r2;
  };
  if (!inside(start)) throw std::invalid_argument("sample_brownian: start outside the disk");
  Rng rng(seed, Purpose::Brownian, index);
  const double sd = std::sqrt(dt);
  PlanarCurve c{{start}, CurveSource::Brownian};
  Point here = start;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const double dx = sd * rng.normal();
    const double dy = sd * rng.normal();
    const Point next{here.x + dx, here.y + dy};
    if (inside(next)) {
      c.vertices.push_back(next);
      here = next;
      continue;
    }
    // Solve |here - center + s * (dx, dy)| = radius for s in (0, 1].
    const Point q = here - domain.center;
    const double a = dx * dx + dy * dy;
    const double b = 2.0 * (q.x * dx + q.y * dy);
    const double cc = q.x * q.x + q.y * q.y - r2;
    const double s = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * cc))) / (2.0 * a);
    c.vertices.push_back({here.x + s * dx, here.y + s * dy});
    break;
  }
  return c;
}

double cmp_distance(const PlanarCurve& a, const PlanarCurve& b) {
  const auto& p = a.vertices;
  const auto& q = b.vertices;
  if (p.empty() || q.empty()) throw std::invalid_argument("cmp_distance: empty curve");
  std::vector<double> prev(q.size());
  std::vector<double> cur(q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double d = norm(p[i] - q[j]);
      double reach;
      if (i == 0 && j == 0) {
        reach = 0.0;
      } else if (i == 0) {
        reach = cur[j - 1];
      } else if (j == 0) {
        reach = prev[0];
      } else {
        reach = std::min({prev[j], prev[j - 1], cur[j - 1]});
      }
      cur[j] = std::max(reach, d);
    }
    std::swap(prev, cur);
  }
  return prev.back();
}

double point_angle(Point p, Point center) {
  double theta = std::atan2(p.y - center.y, p.x - center.x);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
  return theta;
}

double exit_angle(const WalkPath& p, Disk domain) {
  if (!p.stopped_at_boundary) throw std::invalid_argument("exit_angle: walk did not stop at the boundary");
  return point_angle(p.embedded.back(), domain.center);
}

void write_walk_csv(const WalkPath& w, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.precision(17);
  out << "step,cell,x,y\n";
  for (std::size_t k = 0; k < w.cells.size(); ++k) {
    const Point p = k < w.embedded.size() ? w.embedded[k] : Point{};
    out << k << ',' << w.cells[k] << ',' << p.x << ',' << p.y << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace lqgv
