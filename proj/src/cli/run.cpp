#include "lqgv/cli/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "lqgv/io.hpp"

namespace lqgv::cli {

namespace fs = std::filesystem;

namespace {

RngSeed field_seed(const RunConfig& c) { return RngSeed{c.seed, 0}; }

RngSeed point_seed(const RunConfig& c) { return RngSeed{c.poisson_seed.value_or(c.seed), 1}; }

FieldSpec field_spec(const RunConfig& c, FieldSpec base) {
  if (c.has("field")) base.model = c.field;
  if (c.has("n")) base.n = c.n;
  if (c.has("side")) base.side = c.side;
  if (c.has("topology")) base.topology = c.topology;
  if (c.has("t_min")) base.t_min_mesh = c.t_min;
  if (c.has("alpha")) base.alpha = c.alpha;
  if (c.has("shift")) base.shift = c.shift;
  return base;
}

FieldSpec field_spec(const RunConfig& c) {
  return FieldSpec{c.field, c.n, c.side, c.topology, c.t_min, c.alpha, c.shift};
}

InstanceSpec instance_spec(const RunConfig& c, InstanceSpec base) {
  base.field = field_spec(c, base.field);
  if (c.has("disk")) base.disk = c.disk;
  if (c.has("lambda")) base.lambda = c.lambda.front();
  if (c.has("points")) base.fixed_points = c.points;
  return base;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

/// Field for the configured spec, going through the cache when one is named.
Field obtain_field(const RunConfig& c, std::ostream& out) {
  const FieldSpec spec = field_spec(c);
  fs::path cache = c.field_cache;
  if (cache.empty()) {
    if (const char* dir = std::getenv("LQGV_CACHE_DIR"); dir != nullptr && *dir != '\0') {
      std::ostringstream name;
      name << std::setprecision(17) << "field-" << to_string(spec.model) << "-" << lqgv::to_string(spec.topology)
           << "-n" << spec.n << "-L" << spec.side << "-t" << spec.t_min_mesh << "-a" << spec.alpha << "-c"
           << spec.shift << "-s" << c.seed << ".lqgf";
      cache = fs::path(dir) / name.str();
    }
  }
  if (!cache.empty() && fs::exists(cache)) {
    Field f = read_field_cache(cache);
    if (!(f.grid() == spec.grid())) {
      throw ConfigError("field cache " + cache.string() + " does not match the configured grid");
    }
    out << "field: read " << cache.string() << "\n";
    return f;
  }
  Field f = FieldFactory(spec).sample(field_seed(c));
  if (!cache.empty()) {
    if (cache.has_parent_path()) fs::create_directories(cache.parent_path());
    write_field_cache(f, cache);
    out << "field: cached " << cache.string() << "\n";
  }
  return f;
}

Instance build_instance(const RunConfig& c, std::ostream& out) {
  const InstanceSpec spec{field_spec(c), c.disk, c.lambda.front(), c.points};
  return make_instance(obtain_field(c, out), spec, point_seed(c));
}

bool cell_graph_connected(const CellGraph& g) {
  if (g.size() == 0) return true;
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::queue<CellId> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const CellId a = q.front();
    q.pop();
    for (CellId b : g.neighbors(a)) {
      if (!seen[b]) {
        seen[b] = 1;
        ++count;
        q.push(b);
      }
    }
  }
  return count == g.size();
}

fs::path resolve(const RunConfig& c, const fs::path& p) { return p.is_absolute() ? p : c.out / p; }

ExperimentReport simulate_one(const RunConfig& c, const Instance& inst, const fs::path& dir, std::ostream& out) {
  ExperimentReport r;
  r.name = "simulate";
  r.seed = field_seed(c);
  r.params = {{"field", field_spec(c).to_json()}, {"lambda", c.lambda.front()}, {"points", c.points},
              {"disk", c.disk}, {"walks", c.walks}, {"max_steps", c.max_steps}};
  r.replicates = 1;
  const Tessellation& t = inst.tess;
  write_field_cache(inst.field, dir / "field.lqgf");
  write_points_csv(t.points, t.grid, dir / "points.csv");
  const CellStats cs = cell_stats(t, inst.measure, inst.graph);
  write_cell_stats_csv(t, cs, dir / "cells.csv");
  io::write_ppm(io::render_owners(t), dir / "owners.ppm");

  std::vector<double> moments;
  for (CellId k = 0; k < t.cell_count(); ++k) {
    if (cs.area[k] > 0.0) moments.push_back(cs.diam[k] * cs.diam[k] * static_cast<double>(cs.deg[k]) / cs.area[k]);
  }
  r.estimate("cells", static_cast<double>(t.cell_count()), 0, 0);
  r.estimate("total_mass", inst.measure.total(), 0, 0);
  if (!moments.empty()) r.estimate("cell_moment_mean", stats::mean(moments), 0, 0);
  std::size_t empty = 0;
  for (CellId k = 0; k < t.cell_count(); ++k) empty += t.cell(k).empty() ? 1 : 0;
  r.check("empty_cells", static_cast<double>(empty), 0.0, 0.0);
  r.check("cell_graph_connected", cell_graph_connected(t.graph) ? 1.0 : 0.0, 1.0, 1.0);
  r.check("cell_moment_mean", moments.empty() ? 0.0 : stats::mean(moments), 0.0,
          std::numeric_limits<double>::max());

  if (!c.emit_distances.empty()) {
    std::vector<std::pair<VertexId, VertexId>> pairs;
    for (CellId k = 0; k + 1 < t.cell_count(); ++k) pairs.emplace_back(t.center_vertex(k), t.center_vertex(k + 1));
    const fs::path p = resolve(c, c.emit_distances);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_distances_csv(inst.graph, pairs, p);
  }
  if (c.walks > 0) {
    const fs::path walk_dir = dir / "walks";
    fs::create_directories(walk_dir);
    const VertexId start = t.grid.nearest_vertex(inst.disk ? inst.disk->center : t.grid.center());
    const bool stop = t.graph.boundary_cells().size() > 0;
    std::size_t stopped = 0;
    for (std::size_t k = 0; k < c.walks; ++k) {
      const WalkPath w = run_walk(t, start, c.max_steps, stop, RngSeed{c.seed, 2}, k);
      stopped += w.stopped_at_boundary ? 1 : 0;
      std::ostringstream name;
      name << "walk_" << std::setw(5) << std::setfill('0') << k << ".csv";
      write_walk_csv(w, walk_dir / name.str());
    }
    r.estimate("walks_stopped", static_cast<double>(stopped), 0, 0);
  }
  r.finalize();
  out << "simulate: " << t.cell_count() << " cells, " << t.graph.edge_count() << " adjacencies\n";
  return r;
}

ExperimentReport tutte_report(const RunConfig& c, const Instance& inst, const fs::path& dir, std::ostream& out) {
  ExperimentReport r;
  r.name = "tutte";
  r.seed = field_seed(c);
  r.params = {{"field", field_spec(c).to_json()}, {"lambda", c.lambda.front()}, {"points", c.points}, {"tol", c.tol}};
  r.replicates = 1;
  const Tessellation& t = inst.tess;
  const auto [z0, x0] = marked_cells(inst, point_seed(c));
  const Embedding e = tutte_embedding(t, z0, x0, c.tol);
  const Disk window = inst.disk ? *inst.disk : Disk{t.grid.center(), 0.5 * t.grid.side()};
  const DiskMap map(window, t.center(z0), t.grid.position(e.start_vertex));
  write_embedding_csv(e, t, map, dir / "embedding.csv");
  write_embedding_svg(e, t.graph, dir / "embedding.svg");
  io::write_ppm(io::render_owners(t), dir / "owners.ppm");
  double sum = 0.0;
  for (double q : e.hitting) sum += q;
  const Displacement d = embedding_displacement(e, t, map);
  r.estimate("cells", static_cast<double>(t.cell_count()), 0, 0);
  r.estimate("z0", z0, 0, 0);
  r.estimate("x0", x0, 0, 0);
  r.estimate("displacement_mean", d.mean, 0, 0);
  r.estimate("displacement_max", d.max, 0, 0);
  r.check("residual", e.residual, 0.0, c.tol);
  r.check("hitting_sum_error", std::abs(sum - 1.0), 0.0, 1e-10);
  r.check("maximum_principle", maximum_principle_holds(e, t.graph, 10.0 * c.tol) ? 1.0 : 0.0, 1.0, 1.0);
  r.finalize();
  out << "tutte: " << t.cell_count() << " cells, residual " << e.residual << "\n";
  return r;
}

ExperimentReport render_report(const RunConfig& c, const Instance& inst, const fs::path& dir, std::ostream& out) {
  ExperimentReport r;
  r.name = "render";
  r.seed = field_seed(c);
  r.params = {{"field", field_spec(c).to_json()}, {"lambda", c.lambda.front()}, {"points", c.points}, {"disk", c.disk}};
  r.replicates = 1;
  const Tessellation& t = inst.tess;
  const io::Image img = io::render_owners(t);
  io::write_ppm(img, dir / "owners.ppm");
  io::write_ppm(io::render_boundary_outline(t), dir / "outline.ppm");
  std::unordered_set<std::uint32_t> colors;
  for (std::size_t k = 0; k < img.width * img.height; ++k) {
    const std::uint32_t rgb = (std::uint32_t{img.rgb[3 * k]} << 16) | (std::uint32_t{img.rgb[3 * k + 1]} << 8) |
                              std::uint32_t{img.rgb[3 * k + 2]};
    if (io::color_owner(rgb) != kNoOwner) colors.insert(rgb);
  }
  const bool exact = io::decode_owners(img) == t.owner;
  r.estimate("cells", static_cast<double>(t.cell_count()), 0, 0);
  r.estimate("pixels", static_cast<double>(img.width * img.height), 0, 0);
  r.check("distinct_cell_colors_minus_cells", static_cast<double>(colors.size()) - static_cast<double>(t.cell_count()),
          0.0, 0.0);
  r.check("decode_matches_owner", exact ? 1.0 : 0.0, 1.0, 1.0);
  r.finalize();
  out << "render: " << img.width << "x" << img.height << ", " << colors.size() << " cell colours\n";
  return r;
}

void write_report(const ExperimentReport& r, const fs::path& path) { write_text(path, dump_report(r)); }

}  // namespace

ExperimentReport run_suite(const RunConfig& c) {
  const RngSeed seed{c.seed, 0};
  const unsigned th = c.threads;
  const std::string& s = c.suite;
  if (s == "variance") {
    VarianceLawParams p;
    if (c.has("n")) p.n = c.n;
    if (c.has("side")) p.side = c.side;
    if (c.has("replicates")) p.seeds = c.replicates;
    return variance_law(p, seed, th);
  }
  if (s == "scaling") {
    ScalingParams p;
    p.field = field_spec(c, p.field);
    return scaling_covariance(p, seed, th);
  }
  if (s == "euclidean") {
    EuclideanParams p;
    if (c.has("walks")) p.walks = c.walks;
    if (c.has("lambda")) p.walk_lambda = c.lambda.front();
    if (c.has("n")) p.volume_n = c.n;
    if (c.has("n")) p.walk_n = c.n;
    return euclidean_suite(p, seed, th);
  }
  if (s == "volume") {
    VolumeParams p;
    p.field = field_spec(c, p.field);
    if (c.has("replicates")) p.replicates = c.replicates;
    return volume_exponent(p, seed, th);
  }
  if (s == "annulus") {
    AnnulusParams p;
    p.field = field_spec(c, p.field);
    if (c.has("replicates")) p.replicates = c.replicates;
    return annulus_crossing(p, seed, th);
  }
  if (s == "swallow") {
    SwallowParams p;
    p.instance = instance_spec(c, p.instance);
    if (c.has("replicates")) p.replicates = c.replicates;
    return swallow_statistic(p, seed, th);
  }
  if (s == "mass-transport") {
    MassTransportParams p;
    p.instance = instance_spec(c, p.instance);
    if (c.has("replicates")) p.replicates = c.replicates;
    return mass_transport(p, seed, th);
  }
  if (s == "moment-tail") {
    MomentTailParams p;
    p.instance = instance_spec(c, p.instance);
    if (c.has("replicates")) p.replicates = c.replicates;
    return moment_tail(p, seed, th);
  }
  if (s == "tutte") {
    TutteParams p;
    p.field = field_spec(c, p.field);
    if (c.has("points")) p.cells = c.points;
    if (c.has("walks")) p.monte_carlo_walks = c.walks;
    if (c.has("lambda")) p.lambdas = c.lambda;
    if (c.has("replicates")) p.instances = c.replicates;
    if (c.has("tol")) p.tol = c.tol;
    return tutte_contracts(p, seed, th);
  }
  if (s == "convergence") {
    ConvergenceParams p;
    p.field = field_spec(c, p.field);
    if (c.has("lambda")) p.lambdas = c.lambda;
    if (c.has("replicates")) p.replicates = c.replicates;
    if (c.has("walks")) p.walks = c.walks;
    if (c.has("max_steps")) p.max_steps = c.max_steps;
    if (c.has("dt")) p.dt = c.dt;
    if (c.has("tol")) p.tol = c.tol;
    return walk_convergence(p, seed, th);
  }
  if (s == "isotropy") {
    IsotropyParams p;
    p.instance = instance_spec(c, p.instance);
    if (c.has("replicates")) p.replicates = c.replicates;
    if (c.has("walks")) p.increments = c.walks;
    return isotropy(p, seed, th);
  }
  if (s == "ball-diam") {
    BallDiameterParams p;
    p.field = field_spec(c, p.field);
    if (c.has("replicates")) p.replicates = c.replicates;
    return min_max_ball_diam(p, seed, th);
  }
  throw ConfigError("unknown suite '" + s + "'");
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    validate(c);
    fs::create_directories(c.out);
    write_text(c.out / "config.txt", serialize(c));
    std::vector<fs::path> failed;
    auto record = [&](const ExperimentReport& r, const fs::path& path) {
      write_report(r, path);
      if (!r.pass) failed.push_back(path);
    };
    switch (c.mode) {
      case Mode::Simulate: {
        for (std::size_t k = 0; k < c.replicates; ++k) {
          RunConfig rc = c;
          fs::path dir = c.out;
          if (c.replicates > 1) {
            rc.seed = replicate_seed(RngSeed{c.seed, 0}, k).stream;
            if (c.poisson_seed) rc.poisson_seed = replicate_seed(RngSeed{*c.poisson_seed, 1}, k).stream;
            std::ostringstream name;
            name << "rep_" << std::setw(4) << std::setfill('0') << k;
            dir /= name.str();
            fs::create_directories(dir);
          }
          const Instance inst = build_instance(rc, out);
          record(simulate_one(rc, inst, dir, out), dir / "report.json");
        }
        break;
      }
      case Mode::Tutte: {
        RunConfig rc = c;
        rc.disk = true;
        const Instance inst = build_instance(rc, out);
        record(tutte_report(rc, inst, c.out, out), c.out / "report.json");
        break;
      }
      case Mode::Render: {
        const Instance inst = build_instance(c, out);
        record(render_report(c, inst, c.out, out), c.out / "report.json");
        break;
      }
      case Mode::Verify: {
        const ExperimentReport r = run_suite(c);
        record(r, c.out / ("report_" + c.suite + ".json"));
        for (const auto& ch : r.checks) {
          out << (ch.pass ? "  ok   " : "  FAIL ") << ch.name << " = " << ch.value << " in [" << ch.lo << ", "
              << ch.hi << "]\n";
        }
        break;
      }
    }
    io::write_manifest(c.out);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << "wrote " << (c.out / "manifest.txt").string() << " (" << std::fixed << std::setprecision(1) << secs
        << " s)\n";
    out.unsetf(std::ios::fixed);
    if (!failed.empty()) {
      for (const auto& p : failed) err << "assertion failed: see " << p.string() << "\n";
      return kStatusAssertion;
    }
    return kStatusOk;
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << "\n";
    return kStatusConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid config: " << e.what() << "\n";
    return kStatusConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kStatusAssertion;
  }
}

}  // namespace lqgv::cli
