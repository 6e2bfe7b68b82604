#include "lqgv/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

namespace lqgv {

MetricGraph::MetricGraph(const Field& f) : grid_(f.grid()) {
  active_count_ = grid_.vertex_count();
  build(f);
}

MetricGraph::MetricGraph(const Field& f, std::vector<std::uint8_t> active)
    : grid_(f.grid()), active_(std::move(active)) {
  if (active_.size() != grid_.vertex_count()) {
    throw std::invalid_argument("MetricGraph: mask size does not match the grid");
  }
  active_count_ = static_cast<std::size_t>(std::count_if(
      active_.begin(), active_.end(), [](std::uint8_t a) { return a != 0; }));
  if (active_count_ == 0) throw std::invalid_argument("MetricGraph: mask has no active vertex");
  build(f);
}

void MetricGraph::build(const Field& f) {
  const std::size_t n = grid_.n();
  const double delta = grid_.mesh();
  east_.assign(grid_.vertex_count(), 0.0);
  north_.assign(grid_.vertex_count(), 0.0);
  auto edge_weight = [&](VertexId u, VertexId v) {
    const double w = delta * std::exp(kXi * 0.5 * (f[u] + f[v]));
    if (!std::isfinite(w) || !(w > 0.0)) {
      std::ostringstream msg;
      msg << "build_metric_graph: edge weight " << w << " between vertices " << u << " and " << v;
      throw NumericError(msg.str());
    }
    min_weight_ = std::min(min_weight_, w);
    return w;
  };
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const VertexId v = grid_.index(i, j);
      if (!active(v)) continue;
      if (i + 1 < n || grid_.is_torus()) {
        const VertexId e = grid_.index((i + 1) % n, j);
        if (active(e)) east_[v] = edge_weight(v, e);
      }
      if (j + 1 < n || grid_.is_torus()) {
        const VertexId t = grid_.index(i, (j + 1) % n);
        if (active(t)) north_[v] = edge_weight(v, t);
      }
    }
  }
}

std::size_t MetricGraph::edges(VertexId v, std::array<WeightedEdge, 4>& out) const {
  const std::size_t n = grid_.n();
  const std::size_t i = grid_.column(v);
  const std::size_t j = grid_.row(v);
  const bool torus = grid_.is_torus();
  std::size_t count = 0;
  if (east_[v] > 0.0) out[count++] = {grid_.index((i + 1) % n, j), east_[v]};
  if (i > 0 || torus) {
    const VertexId w = grid_.index((i + n - 1) % n, j);
    if (east_[w] > 0.0) out[count++] = {w, east_[w]};
  }
  if (north_[v] > 0.0) out[count++] = {grid_.index(i, (j + 1) % n), north_[v]};
  if (j > 0 || torus) {
    const VertexId s = grid_.index(i, (j + n - 1) % n);
    if (north_[s] > 0.0) out[count++] = {s, north_[s]};
  }
  return count;
}

double MetricGraph::weight(VertexId u, VertexId v) const {
  std::array<WeightedEdge, 4> e;
  const std::size_t k = edges(u, e);
  for (std::size_t a = 0; a < k; ++a) {
    if (e[a].to == v) return e[a].weight;
  }
  return kInfinity;
}

bool MetricGraph::on_domain_boundary(VertexId v) const {
  if (!active(v)) return false;
  if (grid_.on_window_edge(v)) return true;
  if (active_.empty()) return false;
  std::array<VertexId, 4> nb;
  const std::size_t k = grid_.neighbors(v, nb);
  for (std::size_t a = 0; a < k; ++a) {
    if (!active_[nb[a]]) return true;
  }
  return false;
}

MetricGraph build_metric_graph(const Field& f) { return MetricGraph(f); }

std::vector<std::uint8_t> disk_mask(const Grid& grid, Point center, double radius) {
  std::vector<std::uint8_t> mask(grid.vertex_count(), 0);
  for (VertexId v = 0; v < mask.size(); ++v) {
    mask[v] = grid.distance(center, grid.position(v)) <= radius ? 1 : 0;
  }
  return mask;
}

// ---------------------------------------------------------------------------

namespace {

struct Label {
  double dist;
  VertexId v;
  bool operator>(const Label& o) const { return dist > o.dist || (dist == o.dist && v > o.v); }
};

using LabelQueue = std::priority_queue<Label, std::vector<Label>, std::greater<Label>>;

}  // namespace

DijkstraWorkspace::DijkstraWorkspace(std::size_t vertex_count)
    : dist_(vertex_count, kInfinity), settled_(vertex_count, 0) {}

void DijkstraWorkspace::reset() {
  for (VertexId v : touched_) {
    dist_[v] = kInfinity;
    settled_[v] = 0;
  }
  touched_.clear();
  order_.clear();
}

const std::vector<VertexId>& DijkstraWorkspace::run(const MetricGraph& g,
                                                    std::span<const VertexId> sources,
                                                    double cutoff) {
  if (dist_.size() != g.grid().vertex_count()) {
    throw std::invalid_argument("DijkstraWorkspace: size does not match the graph");
  }
  reset();
  LabelQueue queue;
  for (VertexId s : sources) {
    if (!g.active(s)) throw std::invalid_argument("Dijkstra source is an inactive vertex");
    if (dist_[s] == 0.0) continue;
    dist_[s] = 0.0;
    touched_.push_back(s);
    queue.push({0.0, s});
  }
  std::array<WeightedEdge, 4> edges;
  while (!queue.empty()) {
    const Label top = queue.top();
    queue.pop();
    if (settled_[top.v] || top.dist > dist_[top.v]) continue;
    if (top.dist > cutoff) break;
    settled_[top.v] = 1;
    order_.push_back(top.v);
    const std::size_t k = g.edges(top.v, edges);
    for (std::size_t a = 0; a < k; ++a) {
      const VertexId w = edges[a].to;
      const double nd = top.dist + edges[a].weight;
      if (nd < dist_[w]) {
        if (dist_[w] == kInfinity) touched_.push_back(w);
        dist_[w] = nd;
        queue.push({nd, w});
      }
    }
  }
  return order_;
}

std::vector<double> distances_from(const MetricGraph& g, VertexId src) {
  DijkstraWorkspace ws(g.grid().vertex_count());
  const VertexId s[1] = {src};
  ws.run(g, s);
  std::vector<double> out(g.grid().vertex_count());
  for (VertexId v = 0; v < out.size(); ++v) out[v] = ws.distance(v);
  return out;
}

double distance(const MetricGraph& g, VertexId src, VertexId dst, std::vector<VertexId>* path) {
  const std::size_t count = g.grid().vertex_count();
  if (src >= count || dst >= count) throw std::invalid_argument("distance: vertex out of range");
  if (!g.active(src) || !g.active(dst)) throw std::invalid_argument("distance: inactive vertex");
  std::vector<double> dist(count, kInfinity);
  std::vector<VertexId> pred(count, static_cast<VertexId>(-1));
  std::vector<std::uint8_t> settled(count, 0);
  LabelQueue queue;
  dist[src] = 0.0;
  queue.push({0.0, src});
  std::array<WeightedEdge, 4> edges;
  while (!queue.empty()) {
    const Label top = queue.top();
    queue.pop();
    if (settled[top.v]) continue;
    settled[top.v] = 1;
    if (top.v == dst) break;
    const std::size_t k = g.edges(top.v, edges);
    for (std::size_t a = 0; a < k; ++a) {
      const VertexId w = edges[a].to;
      const double nd = top.dist + edges[a].weight;
      if (nd < dist[w]) {
        dist[w] = nd;
        pred[w] = top.v;
        queue.push({nd, w});
      }
    }
  }
  if (path) {
    path->clear();
    if (dist[dst] < kInfinity) {
      for (VertexId v = dst; v != src; v = pred[v]) path->push_back(v);
      path->push_back(src);
      std::reverse(path->begin(), path->end());
    }
  }
  return dist[dst];
}

MetricBall metric_ball(const MetricGraph& g, VertexId center, double s, DijkstraWorkspace& ws) {
  if (!(s >= 0.0)) throw std::invalid_argument("metric_ball: radius must be non-negative");
  const VertexId src[1] = {center};
  const auto& order = ws.run(g, src, s);
  MetricBall ball{center, s, {order.begin(), order.end()}};
  std::sort(ball.members.begin(), ball.members.end());
  return ball;
}

MetricBall metric_ball(const MetricGraph& g, VertexId center, double s) {
  DijkstraWorkspace ws(g.grid().vertex_count());
  return metric_ball(g, center, s, ws);
}

double ball_volume(const AreaMeasure& m, const MetricBall& b) {
  double total = 0.0;
  for (VertexId v : b.members) {
    if (v >= m.masses().size()) throw std::invalid_argument("ball_volume: ball and measure grids differ");
    total += m[v];
  }
  return total;
}

double annulus_distance(const MetricGraph& g, std::span<const VertexId> inner,
                        std::span<const VertexId> outer) {
  if (inner.empty() || outer.empty()) throw std::invalid_argument("annulus_distance: empty vertex set");
  std::vector<std::uint8_t> is_outer(g.grid().vertex_count(), 0);
  for (VertexId v : outer) is_outer[v] = 1;
  for (VertexId v : inner) {
    if (is_outer[v]) throw std::invalid_argument("annulus_distance: inner and outer sets intersect");
  }
  DijkstraWorkspace ws(g.grid().vertex_count());
  const auto& order = ws.run(g, inner);
  for (VertexId v : order) {
    if (is_outer[v]) return ws.distance(v);
  }
  return kInfinity;
}

void write_distances_csv(const MetricGraph& g,
                         std::span<const std::pair<VertexId, VertexId>> pairs,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.precision(17);
  out << "src,dst,distance\n";
  for (const auto& [a, b] : pairs) out << a << ',' << b << ',' << distance(g, a, b) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace lqgv
