#include "lqgv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace lqgv {

AreaMeasure::AreaMeasure(Grid grid, std::vector<double> mass)
    : grid_(std::move(grid)), mass_(std::move(mass)) {
  if (mass_.size() != grid_.vertex_count()) {
    throw std::invalid_argument("AreaMeasure: mass count does not match the grid");
  }
  cumulative_.resize(mass_.size());
  double running = 0.0;
  for (std::size_t v = 0; v < mass_.size(); ++v) {
    if (!std::isfinite(mass_[v]) || mass_[v] < 0.0) {
      std::ostringstream msg;
      msg << "AreaMeasure: invalid mass " << mass_[v] << " at vertex " << v;
      throw NumericError(msg.str());
    }
    if (mass_[v] > 0.0) ++support_;
    running += mass_[v];
    cumulative_[v] = running;
  }
  total_ = running;
  if (!std::isfinite(total_)) throw NumericError("AreaMeasure: total mass overflows");
}

AreaMeasure AreaMeasure::restricted(std::span<const std::uint8_t> mask) const {
  if (mask.size() != mass_.size()) throw std::invalid_argument("restricted: mask size mismatch");
  std::vector<double> out(mass_);
  for (std::size_t v = 0; v < out.size(); ++v) {
    if (!mask[v]) out[v] = 0.0;
  }
  return AreaMeasure(grid_, std::move(out));
}

AreaMeasure AreaMeasure::normalized(double target) const {
  if (!(total_ > 0.0)) throw std::invalid_argument("normalized: measure has zero total mass");
  const double factor = target / total_;
  std::vector<double> out(mass_.size());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = mass_[v] * factor;
  return AreaMeasure(grid_, std::move(out));
}

VertexId AreaMeasure::sample_vertex(Rng& rng) const {
  if (!(total_ > 0.0)) throw std::invalid_argument("sample_vertex: measure has zero total mass");
  for (;;) {
    const double u = rng.uniform() * total_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) continue;  // u rounded up to the total
    const auto v = static_cast<VertexId>(it - cumulative_.begin());
    if (mass_[v] > 0.0) return v;
  }
}

AreaMeasure build_measure(const Field& f) {
  const Grid& grid = f.grid();
  // mesh^{2 + gamma^2 / 2} with gamma^2 / 2 = 4/3.
  const double prefactor = std::pow(grid.mesh(), 2.0 + 4.0 / 3.0);
  std::vector<double> mass(grid.vertex_count());
  for (VertexId v = 0; v < mass.size(); ++v) {
    mass[v] = prefactor * std::exp(kGamma * f[v]);
    if (!std::isfinite(mass[v])) {
      std::ostringstream msg;
      msg << "build_measure: mass overflows at vertex " << v << " (field value " << f[v] << ")";
      throw NumericError(msg.str());
    }
  }
  return AreaMeasure(grid, std::move(mass));
}

namespace {

PointProcess draw_distinct(const AreaMeasure& m, std::size_t count, Rng& rng) {
  if (count > m.support_size()) {
    throw std::invalid_argument("cannot draw more distinct points than vertices with positive mass");
  }
  PointProcess p;
  p.points.reserve(count);
  std::unordered_set<VertexId> taken;
  taken.reserve(2 * count);
  while (p.points.size() < count) {
    const VertexId v = m.sample_vertex(rng);
    if (!taken.insert(v).second) continue;
    p.points.push_back({v, m.grid().position(v)});
  }
  return p;
}

void check_budget(const AreaMeasure& m, double expected) {
  const double limit = 0.25 * static_cast<double>(m.support_size());
  if (expected > limit) {
    std::ostringstream msg;
    msg << "expected point count " << expected << " exceeds a quarter of the " << m.support_size()
        << " vertices carrying mass; the tessellation would be mesh-limited";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

PointProcess sample_poisson(const AreaMeasure& m, double lambda, RngSeed seed) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("sample_poisson: lambda must be positive and finite");
  }
  if (!(m.total() > 0.0)) throw std::invalid_argument("sample_poisson: measure has zero total mass");
  const double expected = lambda * m.total();
  check_budget(m, expected);
  Rng count_rng(seed, Purpose::PoissonCount);
  const auto count = static_cast<std::size_t>(count_rng.poisson(expected));
  Rng rng(seed, Purpose::PoissonLocation);
  PointProcess p = draw_distinct(m, count, rng);
  p.lambda = lambda;
  p.seed = seed;
  return p;
}

PointProcess sample_points(const AreaMeasure& m, std::size_t count, RngSeed seed) {
  if (!(m.total() > 0.0)) throw std::invalid_argument("sample_points: measure has zero total mass");
  check_budget(m, static_cast<double>(count));
  Rng rng(seed, Purpose::PoissonLocation);
  PointProcess p = draw_distinct(m, count, rng);
  p.lambda = static_cast<double>(count) / m.total();
  p.seed = seed;
  return p;
}

void write_points_csv(const PointProcess& p, const Grid& grid, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.precision(17);
  out << "index,i,j,x,y\n";
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    const auto& pt = p.points[k];
    out << k << ',' << grid.column(pt.vertex) << ',' << grid.row(pt.vertex) << ','
        << pt.position.x << ',' << pt.position.y << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace lqgv
