#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "lqgv/cli/run.hpp"

namespace {

using lqgv::cli::RunConfig;

/// Applies a command-line override as if it were a config line.
template <typename T>
void override_key(RunConfig& c, const std::string& key, const std::optional<T>& v) {
  if (!v) return;
  std::ostringstream os;
  os.precision(17);
  os << *v;
  lqgv::cli::apply_setting(c, key, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voronoi tessellations, random walks and Tutte embeddings on discretized LQG surfaces"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed, poisson_seed;
  std::optional<std::string> out_dir, field_cache, emit_distances, lambda;
  std::optional<std::size_t> walks, max_steps;
  std::optional<double> dt;

  const std::pair<const char*, const char*> modes[] = {
      {"simulate", "sample fields, points and cells; write artifacts and walks"},
      {"tutte", "Tutte-embed a disk tessellation into the unit disk"},
      {"verify", "run one verification suite and write its report"},
      {"render", "write the owner map and boundary outline images"},
  };
  for (const auto& [mode, help] : modes) {
    CLI::App* sub = app.add_subcommand(mode, help);
    sub->add_option("--config", config_path, "flat key = value config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--threads", threads, "worker threads");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--field-cache", field_cache, "read the field from / write it to this cache file");
    sub->add_option("--lambda", lambda, "intensity (comma-separated list for verify suites)");
    sub->add_option("--poisson-seed", poisson_seed, "seed for the point process");
    sub->add_option("--emit-distances", emit_distances, "CSV of point-to-point distances");
    sub->add_option("--walks", walks, "number of walks");
    sub->add_option("--max-steps", max_steps, "walk step cap");
    sub->add_option("--dt", dt, "Brownian time step");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help exits 0; every other command-line error is a config error.
    return app.exit(e) == 0 ? 0 : lqgv::cli::kStatusConfig;
  }
  const std::string mode = app.get_subcommands().front()->get_name();

  RunConfig c;
  try {
    c = lqgv::cli::load_config(config_path);
    if (c.has("mode") && lqgv::cli::to_string(c.mode) != mode) {
      throw lqgv::cli::ConfigError("config sets mode = " + lqgv::cli::to_string(c.mode) + " but the command is " + mode);
    }
    lqgv::cli::apply_setting(c, "mode", mode);
    override_key(c, "threads", threads);
    override_key(c, "seed", seed);
    override_key(c, "out", out_dir);
    override_key(c, "field_cache", field_cache);
    override_key(c, "lambda", lambda);
    override_key(c, "poisson_seed", poisson_seed);
    override_key(c, "emit_distances", emit_distances);
    override_key(c, "walks", walks);
    override_key(c, "max_steps", max_steps);
    override_key(c, "dt", dt);
  } catch (const lqgv::cli::ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return lqgv::cli::kStatusConfig;
  }
  return lqgv::cli::run(c, std::cout, std::cerr);
}
