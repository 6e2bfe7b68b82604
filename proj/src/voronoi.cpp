#include "lqgv/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <tuple>

namespace lqgv {

CellGraph::CellGraph(std::size_t cell_count, std::span<const std::pair<CellId, CellId>> edges,
                     std::vector<std::uint8_t> boundary)
    : boundary_(std::move(boundary)) {
  if (boundary_.size() != cell_count) throw std::invalid_argument("CellGraph: boundary flag count");
  std::vector<std::pair<CellId, CellId>> directed;
  directed.reserve(2 * edges.size());
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("CellGraph: self-loop");
    if (a >= cell_count || b >= cell_count) throw std::invalid_argument("CellGraph: cell out of range");
    directed.emplace_back(a, b);
    directed.emplace_back(b, a);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
  offsets_.assign(cell_count + 1, 0);
  for (auto [a, b] : directed) ++offsets_[a + 1];
  for (std::size_t c = 0; c < cell_count; ++c) offsets_[c + 1] += offsets_[c];
  adjacency_.reserve(directed.size());
  for (auto [a, b] : directed) adjacency_.push_back(b);
}

bool CellGraph::adjacent(CellId a, CellId b) const {
  const auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::vector<CellId> CellGraph::boundary_cells() const {
  std::vector<CellId> out;
  for (CellId c = 0; c < boundary_.size(); ++c) {
    if (boundary_[c]) out.push_back(c);
  }
  return out;
}

// ---------------------------------------------------------------------------

Tessellation tessellate(const MetricGraph& g, const PointProcess& p) {
  if (p.points.empty()) throw std::invalid_argument("tessellate: empty point process");
  const Grid& grid = g.grid();
  const std::size_t count = grid.vertex_count();
  Tessellation t{grid, p, std::vector<std::int32_t>(count, kNoOwner),
                 std::vector<double>(count, kInfinity), {}, {}, {}};

  // Labels ordered by (distance, owner id, vertex id).
  using Label = std::tuple<double, std::int32_t, VertexId>;
  std::priority_queue<Label, std::vector<Label>, std::greater<Label>> queue;
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    const VertexId v = p.points[k].vertex;
    if (v >= count || !g.active(v)) throw std::invalid_argument("tessellate: point on inactive vertex");
    if (t.owner[v] != kNoOwner) throw std::invalid_argument("tessellate: points are not distinct");
    t.owner[v] = static_cast<std::int32_t>(k);
    t.owner_distance[v] = 0.0;
    queue.emplace(0.0, static_cast<std::int32_t>(k), v);
  }
  std::vector<std::uint8_t> settled(count, 0);
  std::array<WeightedEdge, 4> edges;
  while (!queue.empty()) {
    const auto [d, o, v] = queue.top();
    queue.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    const std::size_t k = g.edges(v, edges);
    for (std::size_t a = 0; a < k; ++a) {
      const VertexId w = edges[a].to;
      if (settled[w]) continue;
      const double nd = d + edges[a].weight;
      if (nd < t.owner_distance[w] || (nd == t.owner_distance[w] && o < t.owner[w])) {
        t.owner_distance[w] = nd;
        t.owner[w] = o;
        queue.emplace(nd, o, w);
      }
    }
  }

  const std::size_t cells = p.points.size();
  std::vector<std::pair<CellId, CellId>> adjacency;
  std::vector<std::uint8_t> boundary(cells, 0);
  t.cell_offsets.assign(cells + 1, 0);
  for (VertexId v = 0; v < count; ++v) {
    const std::int32_t o = t.owner[v];
    if (o == kNoOwner) continue;
    ++t.cell_offsets[o + 1];
    if (g.on_domain_boundary(v)) boundary[o] = 1;
    // East and north edges cover every lattice edge once.
    std::array<WeightedEdge, 4> out;
    const std::size_t k = g.edges(v, out);
    for (std::size_t a = 0; a < k; ++a) {
      const std::int32_t q = t.owner[out[a].to];
      if (q != kNoOwner && q != o && v < out[a].to) {
        adjacency.emplace_back(static_cast<CellId>(std::min(o, q)), static_cast<CellId>(std::max(o, q)));
      }
    }
  }
  for (std::size_t c = 0; c < cells; ++c) t.cell_offsets[c + 1] += t.cell_offsets[c];
  t.cell_vertices.resize(t.cell_offsets[cells]);
  std::vector<std::size_t> fill(t.cell_offsets.begin(), t.cell_offsets.end() - 1);
  for (VertexId v = 0; v < count; ++v) {
    if (t.owner[v] != kNoOwner) t.cell_vertices[fill[t.owner[v]]++] = v;
  }
  std::sort(adjacency.begin(), adjacency.end());
  adjacency.erase(std::unique(adjacency.begin(), adjacency.end()), adjacency.end());
  t.graph = CellGraph(cells, adjacency, std::move(boundary));
  return t;
}

// ---------------------------------------------------------------------------

namespace {

std::int64_t cross(LatticePoint o, LatticePoint a, LatticePoint b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<LatticePoint> convex_hull(std::vector<LatticePoint> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<LatticePoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<LatticePoint> lattice_coordinates(const Grid& grid, std::span<const VertexId> vertices,
                                              VertexId anchor) {
  std::vector<LatticePoint> pts;
  pts.reserve(vertices.size());
  if (!grid.is_torus()) {
    for (VertexId v : vertices) {
      pts.push_back({static_cast<std::int64_t>(grid.column(v)), static_cast<std::int64_t>(grid.row(v))});
    }
    return pts;
  }
  std::vector<VertexId> sorted(vertices.begin(), vertices.end());
  std::sort(sorted.begin(), sorted.end());
  auto slot = [&](VertexId v) -> std::ptrdiff_t {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    return (it != sorted.end() && *it == v) ? it - sorted.begin() : -1;
  };
  const auto n = static_cast<std::int64_t>(grid.n());
  std::vector<std::uint8_t> seen(sorted.size(), 0);
  std::vector<LatticePoint> coord(sorted.size());
  std::queue<VertexId> frontier;
  auto start = slot(anchor);
  if (start < 0) start = 0, anchor = sorted[0];
  seen[start] = 1;
  coord[start] = {static_cast<std::int64_t>(grid.column(anchor)), static_cast<std::int64_t>(grid.row(anchor))};
  frontier.push(anchor);
  std::array<VertexId, 4> nb;
  while (!frontier.empty()) {
    const VertexId v = frontier.front();
    frontier.pop();
    const LatticePoint cv = coord[slot(v)];
    grid.neighbors(v, nb);
    // Order written by Grid::neighbors on a torus: +x, -x, +y, -y.
    constexpr std::int64_t dx[4] = {1, -1, 0, 0};
    constexpr std::int64_t dy[4] = {0, 0, 1, -1};
    for (std::size_t a = 0; a < 4; ++a) {
      const auto s = slot(nb[a]);
      if (s < 0 || seen[s]) continue;
      seen[s] = 1;
      coord[s] = {cv.x + dx[a], cv.y + dy[a]};
      frontier.push(nb[a]);
    }
  }
  for (std::size_t s = 0; s < sorted.size(); ++s) {
    if (!seen[s]) {
      // Disconnected remainder: fall back to the minimal image about the anchor.
      const LatticePoint a = coord[start];
      const auto i = static_cast<std::int64_t>(grid.column(sorted[s]));
      const auto j = static_cast<std::int64_t>(grid.row(sorted[s]));
      auto wrap = [n](std::int64_t d) { return d - n * static_cast<std::int64_t>(std::llround(static_cast<double>(d) / n)); };
      coord[s] = {a.x + wrap(i - a.x), a.y + wrap(j - a.y)};
    }
  }
  for (VertexId v : vertices) pts.push_back(coord[slot(v)]);
  return pts;
}

double vertex_set_diameter(const Grid& grid, std::span<const VertexId> vertices, VertexId anchor) {
  if (vertices.size() < 2) return 0.0;
  const auto hull = convex_hull(lattice_coordinates(grid, vertices, anchor));
  std::int64_t best = 0;
  for (std::size_t a = 0; a < hull.size(); ++a) {
    for (std::size_t b = a + 1; b < hull.size(); ++b) {
      const std::int64_t dx = hull[a].x - hull[b].x;
      const std::int64_t dy = hull[a].y - hull[b].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  }
  return grid.mesh() * std::sqrt(static_cast<double>(best));
}

CellStats cell_stats(const Tessellation& t, const AreaMeasure& m, const MetricGraph& g) {
  if (!(t.grid == m.grid()) || !(t.grid == g.grid())) {
    throw std::invalid_argument("cell_stats: tessellation, measure and graph grids differ");
  }
  const std::size_t cells = t.cell_count();
  const double cell_area = t.grid.mesh() * t.grid.mesh();
  CellStats s;
  s.diam.resize(cells);
  s.area.resize(cells);
  s.deg.resize(cells);
  s.bh_radius.resize(cells);
  s.bh_volume.resize(cells);
  s.bh_area.resize(cells);
  DijkstraWorkspace ws(t.grid.vertex_count());
  for (CellId c = 0; c < cells; ++c) {
    const auto verts = t.cell(c);
    s.diam[c] = vertex_set_diameter(t.grid, verts, t.center_vertex(c));
    s.area[c] = cell_area * static_cast<double>(verts.size());
    s.deg[c] = t.graph.degree(c);
    double radius = 0.0;
    for (VertexId v : verts) radius = std::max(radius, t.owner_distance[v]);
    s.bh_radius[c] = radius;
    const MetricBall ball = metric_ball(g, t.center_vertex(c), radius, ws);
    s.bh_volume[c] = ball_volume(m, ball);
    s.bh_area[c] = cell_area * static_cast<double>(ball.members.size());
  }
  return s;
}

double moment_statistic(const Tessellation& t, const CellStats& stats, VertexId origin_vertex) {
  if (origin_vertex >= t.owner.size()) throw std::invalid_argument("moment_statistic: vertex out of range");
  const std::int32_t o = t.owner[origin_vertex];
  if (o == kNoOwner) throw std::invalid_argument("moment_statistic: origin vertex is not covered");
  if (stats.deg[o] == 0) return 0.0;
  return stats.diam[o] * stats.diam[o] * static_cast<double>(stats.deg[o]) / stats.area[o];
}

MassTransportSample mass_transport_sample(const Tessellation& t, const CellStats& stats,
                                          const MetricGraph& g, VertexId origin_vertex) {
  if (!t.grid.is_torus()) {
    throw std::invalid_argument("mass transport needs a torus (exact translation invariance)");
  }
  MassTransportSample out;
  out.lhs = moment_statistic(t, stats, origin_vertex);
  const std::vector<double> d = distances_from(g, origin_vertex);
  for (CellId c = 0; c < t.cell_count(); ++c) {
    if (stats.deg[c] == 0) continue;
    if (d[t.center_vertex(c)] <= stats.bh_radius[c]) {
      out.rhs += stats.diam[c] * stats.diam[c] * static_cast<double>(stats.deg[c]) / stats.bh_area[c];
    }
  }
  return out;
}

MassTransportSides mass_transport_sides(std::span<const MassTransportSample> samples) {
  MassTransportSides s;
  s.replicates = samples.size();
  if (samples.empty()) return s;
  const auto n = static_cast<double>(samples.size());
  auto summarize = [&](auto get, double& mean, double& lo, double& hi) {
    double sum = 0.0;
    for (const auto& x : samples) sum += get(x);
    mean = sum / n;
    double ss = 0.0;
    for (const auto& x : samples) ss += (get(x) - mean) * (get(x) - mean);
    const double se = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    lo = mean - 1.959963984540054 * se;
    hi = mean + 1.959963984540054 * se;
  };
  summarize([](const MassTransportSample& x) { return x.lhs; }, s.lhs_mean, s.lhs_lo, s.lhs_hi);
  summarize([](const MassTransportSample& x) { return x.rhs; }, s.rhs_mean, s.rhs_lo, s.rhs_hi);
  return s;
}

void write_cell_stats_csv(const Tessellation& t, const CellStats& s,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.precision(17);
  out << "point_id,x,y,diam,area,deg,bh_radius,bh_volume\n";
  for (CellId c = 0; c < t.cell_count(); ++c) {
    const Point p = t.center(c);
    out << c << ',' << p.x << ',' << p.y << ',' << s.diam[c] << ',' << s.area[c] << ','
        << s.deg[c] << ',' << s.bh_radius[c] << ',' << s.bh_volume[c] << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace lqgv
