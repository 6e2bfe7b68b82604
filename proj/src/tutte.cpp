#include "lqgv/tutte.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace lqgv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Interior cells reachable from `seed` without entering the boundary.
std::vector<CellId> interior_component(const CellGraph& g, CellId seed) {
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::vector<CellId> comp{seed};
  seen[seed] = 1;
  for (std::size_t k = 0; k < comp.size(); ++k) {
    for (CellId w : g.neighbors(comp[k])) {
      if (!seen[w] && !g.is_boundary(w)) {
        seen[w] = 1;
        comp.push_back(w);
      }
    }
  }
  std::sort(comp.begin(), comp.end());
  return comp;
}

bool touches_boundary(const CellGraph& g, const std::vector<CellId>& comp) {
  for (CellId c : comp) {
    for (CellId w : g.neighbors(c)) {
      if (g.is_boundary(w)) return true;
    }
  }
  return false;
}

/// (D - A) restricted to an interior index set, D the full degree.
class InteriorLaplacian {
 public:
  InteriorLaplacian(const CellGraph& g, const std::vector<CellId>& cells) : cells_(cells) {
    std::vector<std::int64_t> local(g.size(), -1);
    for (std::size_t k = 0; k < cells.size(); ++k) local[cells[k]] = static_cast<std::int64_t>(k);
    offsets_.push_back(0);
    for (CellId c : cells) {
      diag_.push_back(static_cast<double>(g.degree(c)));
      for (CellId w : g.neighbors(c)) {
        if (local[w] >= 0) cols_.push_back(static_cast<std::size_t>(local[w]));
      }
      offsets_.push_back(cols_.size());
    }
  }
  std::size_t size() const { return cells_.size(); }
  double diag(std::size_t i) const { return diag_[i]; }
  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      double acc = diag_[i] * x[i];
      for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) acc -= x[cols_[k]];
      y[i] = acc;
    }
  }

 private:
  const std::vector<CellId>& cells_;
  std::vector<double> diag_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> cols_;
};

/// Jacobi-preconditioned CG on A x = b; stops when done(r) holds.
template <typename Done>
std::size_t conjugate_gradient(const InteriorLaplacian& a, const std::vector<double>& b,
                               std::vector<double>& x, Done done) {
  const std::size_t n = a.size();
  std::vector<double> r(n), z(n), p(n), q(n);
  a.apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  if (done(r)) return 0;
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / a.diag(i);
  p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
  const std::size_t limit = 20 * n + 1000;
  for (std::size_t it = 1; it <= limit; ++it) {
    a.apply(p, q);
    double pq = 0.0;
    for (std::size_t i = 0; i < n; ++i) pq += p[i] * q[i];
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    // Refresh the true residual now and then so rounding cannot fake convergence.
    if (it % 50 == 0) {
      a.apply(x, q);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    }
    if (done(r)) {
      a.apply(x, q);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
      if (done(r)) return it;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / a.diag(i);
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw NumericError("conjugate gradients did not converge");
}

bool is_domain_boundary_vertex(const Tessellation& t, VertexId v) {
  if (t.owner[v] == kNoOwner) return false;
  if (t.grid.on_window_edge(v)) return true;
  std::array<VertexId, 4> nb;
  const std::size_t k = t.grid.neighbors(v, nb);
  for (std::size_t a = 0; a < k; ++a) {
    if (t.owner[nb[a]] == kNoOwner) return true;
  }
  return false;
}

}  // namespace

BoundaryOrder order_boundary(const Tessellation& t, CellId x0) {
  if (t.grid.is_torus()) throw std::invalid_argument("order_boundary: a torus has no boundary");
  if (x0 >= t.cell_count() || !t.graph.is_boundary(x0)) {
    throw std::invalid_argument("order_boundary: x0 is not a boundary cell");
  }
  const auto boundary = t.graph.boundary_cells();
  if (boundary.size() < 3) {
    throw std::invalid_argument("order_boundary: need at least 3 boundary cells, found " +
                                std::to_string(boundary.size()));
  }
  double cx = 0.0, cy = 0.0;
  std::size_t covered = 0;
  for (VertexId v = 0; v < t.owner.size(); ++v) {
    if (t.owner[v] == kNoOwner) continue;
    const Point p = t.grid.position(v);
    cx += p.x;
    cy += p.y;
    ++covered;
  }
  const Point centroid{cx / static_cast<double>(covered), cy / static_cast<double>(covered)};
  std::vector<std::pair<double, VertexId>> ring;
  for (VertexId v = 0; v < t.owner.size(); ++v) {
    if (is_domain_boundary_vertex(t, v)) ring.emplace_back(point_angle(t.grid.position(v), centroid), v);
  }
  std::sort(ring.begin(), ring.end());
  const std::size_t m = ring.size();
  auto owner_at = [&](std::size_t k) { return static_cast<CellId>(t.owner[ring[k % m].second]); };
  std::size_t start = m;
  for (std::size_t k = 0; k < m; ++k) {
    if (owner_at(k) == x0 && owner_at(k + m - 1) != x0) {
      start = k;
      break;
    }
  }
  if (start == m) start = 0;  // x0 owns the whole ring
  BoundaryOrder out;
  out.start_vertex = ring[start].second;
  std::vector<std::uint8_t> listed(t.cell_count(), 0);
  for (std::size_t k = 0; k < m; ++k) {
    const CellId c = owner_at(start + k);
    if (!listed[c]) {
      listed[c] = 1;
      out.cells.push_back(c);
    }
  }
  if (out.cells.size() != boundary.size()) {
    throw std::logic_error("order_boundary: boundary scan disagrees with the boundary cell set");
  }
  return out;
}

std::vector<double> hitting_probabilities(const CellGraph& g, CellId z0) {
  if (z0 >= g.size()) throw std::invalid_argument("hitting_probabilities: z0 out of range");
  if (g.is_boundary(z0)) throw std::invalid_argument("hitting_probabilities: z0 is a boundary cell");
  const std::vector<CellId> comp = interior_component(g, z0);
  if (!touches_boundary(g, comp)) {
    std::ostringstream msg;
    msg << "hitting_probabilities: the interior component of cell " << z0 << " (" << comp.size()
        << " cells) never reaches the boundary";
    throw std::invalid_argument(msg.str());
  }
  InteriorLaplacian lap(g, comp);
  std::vector<double> rhs(comp.size(), 0.0);
  const auto z_local = static_cast<std::size_t>(std::lower_bound(comp.begin(), comp.end(), z0) - comp.begin());
  rhs[z_local] = 1.0;
  std::vector<double> u(comp.size(), 0.0);
  conjugate_gradient(lap, rhs, u, [](const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) s += std::abs(x);
    return s < 1e-13;
  });
  std::vector<double> probs(g.size(), 0.0);
  for (std::size_t i = 0; i < comp.size(); ++i) {
    for (CellId w : g.neighbors(comp[i])) {
      if (g.is_boundary(w)) probs[w] += u[i];
    }
  }
  return probs;
}

std::vector<Point> place_boundary(const std::vector<double>& probs, const std::vector<CellId>& order) {
  std::vector<Point> out;
  out.reserve(order.size());
  double cumulative = 0.0;
  for (CellId c : order) {
    if (c >= probs.size()) throw std::invalid_argument("place_boundary: cell out of range");
    cumulative += probs[c];
    const double theta = kTwoPi * cumulative;
    out.push_back({std::cos(theta), std::sin(theta)});
  }
  return out;
}

HarmonicSolution harmonic_extension(const CellGraph& g, std::vector<Point> positions, double tol) {
  if (positions.size() != g.size()) throw std::invalid_argument("harmonic_extension: position count");
  if (!(tol > 0.0)) throw std::invalid_argument("harmonic_extension: tolerance must be positive");
  HarmonicSolution sol;
  std::vector<std::uint8_t> done(g.size(), 0);
  for (CellId c = 0; c < g.size(); ++c) done[c] = g.is_boundary(c) ? 1 : 0;
  for (CellId seed = 0; seed < g.size(); ++seed) {
    if (done[seed]) continue;
    const std::vector<CellId> comp = interior_component(g, seed);
    for (CellId c : comp) done[c] = 1;
    if (!touches_boundary(g, comp)) {
      std::ostringstream msg;
      msg << "harmonic_extension: interior component not connected to the boundary:";
      for (std::size_t k = 0; k < comp.size() && k < 20; ++k) msg << ' ' << comp[k];
      if (comp.size() > 20) msg << " ... (" << comp.size() << " cells)";
      throw std::invalid_argument(msg.str());
    }
    InteriorLaplacian lap(g, comp);
    for (int coord = 0; coord < 2; ++coord) {
      auto get = [coord](const Point& p) { return coord == 0 ? p.x : p.y; };
      std::vector<double> rhs(comp.size(), 0.0);
      std::vector<double> x(comp.size(), 0.0);
      for (std::size_t i = 0; i < comp.size(); ++i) {
        for (CellId w : g.neighbors(comp[i])) {
          if (g.is_boundary(w)) rhs[i] += get(positions[w]);
        }
      }
      const auto its = conjugate_gradient(lap, rhs, x, [&](const std::vector<double>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
          if (std::abs(r[i]) / lap.diag(i) > 0.1 * tol) return false;
        }
        return true;
      });
      sol.iterations = std::max(sol.iterations, its);
      for (std::size_t i = 0; i < comp.size(); ++i) {
        (coord == 0 ? positions[comp[i]].x : positions[comp[i]].y) = x[i];
      }
    }
  }
  for (CellId c = 0; c < g.size(); ++c) {
    if (g.is_boundary(c) || g.degree(c) == 0) continue;
    double mx = 0.0, my = 0.0;
    for (CellId w : g.neighbors(c)) {
      mx += positions[w].x;
      my += positions[w].y;
    }
    const double deg = static_cast<double>(g.degree(c));
    sol.residual = std::max({sol.residual, std::abs(positions[c].x - mx / deg),
                             std::abs(positions[c].y - my / deg)});
  }
  sol.positions = std::move(positions);
  return sol;
}

Embedding tutte_embedding(const Tessellation& t, CellId z0, CellId x0, double tol) {
  Embedding e;
  e.z0 = z0;
  e.x0 = x0;
  const BoundaryOrder order = order_boundary(t, x0);
  e.boundary_order = order.cells;
  e.start_vertex = order.start_vertex;
  e.hitting = hitting_probabilities(t.graph, z0);
  const std::vector<Point> placed = place_boundary(e.hitting, order.cells);
  std::vector<Point> positions(t.cell_count());
  for (std::size_t k = 0; k < order.cells.size(); ++k) positions[order.cells[k]] = placed[k];
  HarmonicSolution sol = harmonic_extension(t.graph, std::move(positions), tol);
  e.positions = std::move(sol.positions);
  e.residual = sol.residual;
  return e;
}

bool maximum_principle_holds(const Embedding& e, const CellGraph& g, double slack) {
  std::vector<Point> poly;
  for (CellId c : e.boundary_order) poly.push_back(e.positions[c]);
  std::sort(poly.begin(), poly.end(), [](Point a, Point b) {
    return point_angle(a, {}) < point_angle(b, {});
  });
  // Boundary cells with zero hitting mass share a position up to rounding;
  // merge them (also across the 2 pi wrap) so no edge is degenerate.
  std::vector<Point> merged;
  for (const Point& p : poly) {
    if (merged.empty() || norm(p - merged.back()) > 1e-12) merged.push_back(p);
  }
  while (merged.size() > 1 && norm(merged.back() - merged.front()) <= 1e-12) merged.pop_back();
  poly = std::move(merged);
  if (poly.size() < 3) {
    // Degenerate hull: a point or a chord. Interior cells must sit on it.
    for (CellId c = 0; c < g.size(); ++c) {
      if (g.is_boundary(c) || g.degree(c) == 0) continue;
      const Point p = e.positions[c];
      if (poly.size() == 1 && norm(p - poly[0]) > slack) return false;
      if (poly.size() == 2) {
        const Point d = poly[1] - poly[0];
        const Point q = p - poly[0];
        if (std::abs(d.x * q.y - d.y * q.x) > slack * norm(d)) return false;
      }
    }
    return true;
  }
  for (CellId c = 0; c < g.size(); ++c) {
    if (g.is_boundary(c) || g.degree(c) == 0) continue;
    const Point p = e.positions[c];
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Point a = poly[k];
      const Point b = poly[(k + 1) % poly.size()];
      const double side = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
      if (side < -slack * norm(b - a)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

DiskMap::DiskMap(Disk window, Point z0, Point x0) : window_(window) {
  const Point a{(z0.x - window.center.x) / window.radius, (z0.y - window.center.y) / window.radius};
  if (!(a.x * a.x + a.y * a.y < 1.0)) throw std::invalid_argument("DiskMap: z0 outside the disk");
  ax_ = a.x;
  ay_ = a.y;
  const Point w{(x0.x - window.center.x) / window.radius, (x0.y - window.center.y) / window.radius};
  const Point m = mobius(w);
  const double r = norm(m);
  if (!(r > 0.0)) throw std::invalid_argument("DiskMap: x0 coincides with z0");
  rot_cos_ = m.x / r;
  rot_sin_ = m.y / r;
}

Point DiskMap::mobius(Point w) const {
  // (w - a) / (1 - conj(a) w)
  const double nx = w.x - ax_;
  const double ny = w.y - ay_;
  const double dx = 1.0 - (ax_ * w.x + ay_ * w.y);
  const double dy = -(ax_ * w.y - ay_ * w.x);
  const double d2 = dx * dx + dy * dy;
  return {(nx * dx + ny * dy) / d2, (ny * dx - nx * dy) / d2};
}

Point DiskMap::operator()(Point p) const {
  const Point w{(p.x - window_.center.x) / window_.radius, (p.y - window_.center.y) / window_.radius};
  const Point m = mobius(w);
  // Multiply by exp(-i theta_x0).
  return {m.x * rot_cos_ + m.y * rot_sin_, m.y * rot_cos_ - m.x * rot_sin_};
}

Displacement embedding_displacement(const Embedding& e, const Tessellation& t, const DiskMap& map) {
  Displacement d;
  if (t.cell_count() == 0) return d;
  double sum = 0.0;
  for (CellId c = 0; c < t.cell_count(); ++c) {
    const double gap = norm(e.positions[c] - map(t.center(c)));
    d.max = std::max(d.max, gap);
    sum += gap;
  }
  d.mean = sum / static_cast<double>(t.cell_count());
  return d;
}

void write_embedding_csv(const Embedding& e, const Tessellation& t, const DiskMap& map,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.precision(17);
  out << "cell,tutte_x,tutte_y,apriori_x,apriori_y\n";
  for (CellId c = 0; c < t.cell_count(); ++c) {
    const Point a = map(t.center(c));
    out << c << ',' << e.positions[c].x << ',' << e.positions[c].y << ',' << a.x << ',' << a.y << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_embedding_svg(const Embedding& e, const CellGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.precision(6);
  out << std::fixed;
  const double size = 800.0;
  auto sx = [&](Point p) { return 0.5 * size * (1.0 + 0.95 * p.x); };
  auto sy = [&](Point p) { return 0.5 * size * (1.0 - 0.95 * p.y); };
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<circle cx=\"" << size / 2 << "\" cy=\"" << size / 2 << "\" r=\"" << 0.475 * size
      << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
  out << "<g stroke=\"#3060a0\" stroke-width=\"0.6\">\n";
  for (CellId c = 0; c < g.size(); ++c) {
    for (CellId w : g.neighbors(c)) {
      if (w <= c) continue;
      out << "<line x1=\"" << sx(e.positions[c]) << "\" y1=\"" << sy(e.positions[c]) << "\" x2=\""
          << sx(e.positions[w]) << "\" y2=\"" << sy(e.positions[w]) << "\"/>\n";
    }
  }
  out << "</g>\n<g>\n";
  for (CellId c = 0; c < g.size(); ++c) {
    const char* fill = g.is_boundary(c) ? "#c03030" : "#202020";
    out << "<circle cx=\"" << sx(e.positions[c]) << "\" cy=\"" << sy(e.positions[c])
        << "\" r=\"1.6\" fill=\"" << fill << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace lqgv
