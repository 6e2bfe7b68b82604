#include "lqgv/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace lqgv::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return x;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Simulate: return "simulate";
    case Mode::Tutte: return "tutte";
    case Mode::Verify: return "verify";
    case Mode::Render: return "render";
  }
  return "unknown";
}

Mode mode_from_string(const std::string& s) {
  if (s == "simulate") return Mode::Simulate;
  if (s == "tutte") return Mode::Tutte;
  if (s == "verify") return Mode::Verify;
  if (s == "render") return Mode::Render;
  throw ConfigError("mode: expected simulate, tutte, verify or render, got '" + s + "'");
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "variance", "scaling",     "euclidean", "volume",    "annulus",  "swallow",
      "mass-transport", "moment-tail", "tutte", "convergence", "isotropy", "ball-diam"};
  return names;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "mode") {
    c.mode = mode_from_string(v);
  } else if (key == "n") {
    c.n = parse_unsigned(key, v);
  } else if (key == "side") {
    c.side = parse_double(key, v);
  } else if (key == "topology") {
    try {
      c.topology = topology_from_string(v);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("topology: ") + e.what());
    }
  } else if (key == "field") {
    try {
      c.field = field_model_from_string(v);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("field: ") + e.what());
    }
  } else if (key == "t_min") {
    c.t_min = parse_double(key, v);
  } else if (key == "alpha") {
    c.alpha = parse_double(key, v);
  } else if (key == "shift") {
    c.shift = parse_double(key, v);
  } else if (key == "lambda") {
    c.lambda.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) c.lambda.push_back(parse_double(key, trim(item)));
    if (c.lambda.empty()) throw ConfigError("lambda: empty list");
  } else if (key == "points") {
    c.points = parse_unsigned(key, v);
  } else if (key == "disk") {
    c.disk = parse_bool(key, v);
  } else if (key == "replicates") {
    c.replicates = parse_unsigned(key, v);
  } else if (key == "seed") {
    c.seed = parse_unsigned(key, v);
  } else if (key == "poisson_seed") {
    c.poisson_seed = parse_unsigned(key, v);
  } else if (key == "tol") {
    c.tol = parse_double(key, v);
  } else if (key == "walks") {
    c.walks = parse_unsigned(key, v);
  } else if (key == "max_steps") {
    c.max_steps = parse_unsigned(key, v);
  } else if (key == "dt") {
    c.dt = parse_double(key, v);
  } else if (key == "suite") {
    c.suite = v;
  } else if (key == "out") {
    c.out = v;
  } else if (key == "field_cache") {
    c.field_cache = v;
  } else if (key == "emit_distances") {
    c.emit_distances = v;
  } else if (key == "threads") {
    c.threads = static_cast<unsigned>(parse_unsigned(key, v));
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
  c.explicit_keys.insert(key);
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig c;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (c.has(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      apply_setting(c, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, path.string());
}

void validate(const RunConfig& c) {
  if (c.n < 8 || c.n > 4096) throw ConfigError("n must lie in [8, 4096]");
  if (!(c.side > 0.0)) throw ConfigError("side must be positive");
  if (!(c.t_min > 0.0)) throw ConfigError("t_min must be positive");
  if (!(c.alpha < kQ)) throw ConfigError("alpha must be below Q = " + format_double(kQ));
  for (double l : c.lambda) {
    if (!(l > 0.0)) throw ConfigError("lambda entries must be positive");
  }
  if (c.replicates == 0) throw ConfigError("replicates must be at least 1");
  if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
  if (c.max_steps == 0) throw ConfigError("max_steps must be at least 1");
  if (c.threads == 0) throw ConfigError("threads must be at least 1");
  if (c.topology == Topology::Torus && c.field == FieldModel::ZeroBoundary) {
    throw ConfigError("field zero-boundary needs topology plane");
  }
  if (c.topology == Topology::Torus && c.disk) throw ConfigError("disk domains need topology plane");
  if (c.mode == Mode::Tutte && c.topology == Topology::Torus) throw ConfigError("mode tutte needs topology plane");
  if (c.mode == Mode::Verify) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), c.suite) == names.end()) {
      std::string list;
      for (const auto& s : names) list += (list.empty() ? "" : ", ") + s;
      throw ConfigError("mode verify needs suite = one of " + list);
    }
  } else if (!c.suite.empty()) {
    throw ConfigError("suite is only meaningful with mode verify");
  }
}

std::string serialize(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["mode"] = to_string(c.mode);
  kv["n"] = std::to_string(c.n);
  kv["side"] = format_double(c.side);
  kv["topology"] = lqgv::to_string(c.topology);
  kv["field"] = lqgv::to_string(c.field);
  kv["t_min"] = format_double(c.t_min);
  kv["alpha"] = format_double(c.alpha);
  kv["shift"] = format_double(c.shift);
  std::string lambdas;
  for (double l : c.lambda) lambdas += (lambdas.empty() ? "" : ",") + format_double(l);
  kv["lambda"] = lambdas;
  kv["points"] = std::to_string(c.points);
  kv["disk"] = c.disk ? "true" : "false";
  kv["replicates"] = std::to_string(c.replicates);
  kv["seed"] = std::to_string(c.seed);
  if (c.poisson_seed) kv["poisson_seed"] = std::to_string(*c.poisson_seed);
  kv["tol"] = format_double(c.tol);
  kv["walks"] = std::to_string(c.walks);
  kv["max_steps"] = std::to_string(c.max_steps);
  kv["dt"] = format_double(c.dt);
  if (!c.suite.empty()) kv["suite"] = c.suite;
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

}  // namespace lqgv::cli
