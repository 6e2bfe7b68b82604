#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace lqgv {

/// Identifies one reproducible random stream: a master seed plus a replicate index.
struct RngSeed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Tags separating the independent consumers of one RngSeed.
enum class Purpose : std::uint64_t {
  FieldBand = 1,
  FieldBridge = 2,
  FieldFresh = 3,
  TruncatedBand = 4,
  ZeroBoundary = 5,
  PoissonCount = 6,
  PoissonLocation = 7,
  Walk = 8,
  Brownian = 9,
  MarkedPoint = 10,
  Experiment = 11,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for replicate `replicate` of an ensemble driven by `base`.
RngSeed replicate_seed(RngSeed base, std::uint64_t replicate);

/// Deterministic generator. Uniform, normal and Poisson variates are produced by
/// fixed algorithms on top of std::mt19937_64, so streams are bit-identical
/// across standard libraries (the std distributions are implementation-defined).
class Rng {
 public:
  Rng(RngSeed seed, Purpose purpose, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lqgv
