#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lqgv/verify.hpp"

namespace lqgv::cli {

/// Invalid configuration; the CLI maps it to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode : std::uint8_t { Simulate, Tutte, Verify, Render };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// Verification suites runnable with mode=verify.
const std::vector<std::string>& suite_names();

struct RunConfig {
  Mode mode = Mode::Simulate;
  std::size_t n = 128;
  double side = 1.0;
  Topology topology = Topology::PlaneWindow;
  FieldModel field = FieldModel::WhiteNoise;
  double t_min = 2.0;  // in mesh units
  double alpha = 0.0;
  double shift = 0.0;
  std::vector<double> lambda{50.0};
  std::size_t points = 0;  // nonzero: fixed point count instead of Poisson
  bool disk = false;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> poisson_seed;
  double tol = 1e-10;
  std::size_t walks = 0;
  std::size_t max_steps = 1000000;
  double dt = 1e-3;
  std::string suite;
  std::filesystem::path out = "lqgv-out";
  std::filesystem::path field_cache;
  std::filesystem::path emit_distances;
  unsigned threads = 1;

  /// Keys given explicitly (file or flag); verify suites only override their
  /// defaults with these.
  std::set<std::string> explicit_keys;
  bool has(const std::string& key) const { return explicit_keys.count(key) != 0; }
};

/// Applies one key=value setting. Unknown keys and malformed values throw.
void apply_setting(RunConfig& c, const std::string& key, const std::string& value);

/// Flat "key = value" lines; '#' starts a comment; blank lines ignored.
RunConfig parse_config(std::istream& in, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Cross-field checks; throws ConfigError.
void validate(const RunConfig& c);

/// Canonical text form of every result-affecting setting (sorted keys). The
/// output directory and thread count are left out: they do not change results.
std::string serialize(const RunConfig& c);

}  // namespace lqgv::cli
