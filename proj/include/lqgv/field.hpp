#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "lqgv/grid.hpp"
#include "lqgv/rng.hpp"

namespace lqgv {

/// sqrt(8/3): the only LQG parameter this library works with.
inline constexpr double kGamma = 1.6329931618554521;
/// 2/gamma + gamma/2.
inline constexpr double kQ = 2.0412414523193148;
/// 1/sqrt(6) = gamma / 4, the exponent of the metric edge weights.
inline constexpr double kXi = 0.40824829046386302;

enum class FieldKind : std::uint8_t {
  WhiteNoise = 0,
  WhiteNoiseTruncated = 1,
  ZeroBoundary = 2,
  Composite = 3,
};

/// Scales t in (t_min, t_max] of the white-noise decomposition carried by a field.
struct ScaleRange {
  double t_min = 1.0;
  double t_max = 1.0;
  friend bool operator==(const ScaleRange&, const ScaleRange&) = default;
};

/// Gaussian field sampled at the vertices of a grid. Immutable once built.
class Field {
 public:
  Field(Grid grid, std::vector<double> values, ScaleRange scales, FieldKind kind,
        RngSeed seed);

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](VertexId v) const { return values_[v]; }
  double at(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
  ScaleRange scales() const { return scales_; }
  FieldKind kind() const { return kind_; }
  RngSeed seed() const { return seed_; }

  /// Bilinear interpolation. Plane windows reject points outside the window;
  /// tori wrap periodically.
  double interpolate(Point p) const;

  /// The field plus a constant.
  Field shifted(double c) const;

 private:
  Grid grid_;
  std::vector<double> values_;
  ScaleRange scales_;
  FieldKind kind_;
  RngSeed seed_;
};

/// Field equal to c everywhere.
Field constant_field(const Grid& grid, double c);

/// Smallest admissible fine cutoff: a quarter of the mesh.
double minimum_cutoff(const Grid& grid);

/// Sampler for the scale band (t_lo, t_hi] of the white-noise decomposition
///
///   h_t(z) = sqrt(pi) * int_{t^2}^{1} int p(s/2; z, w) W(ds, dw).
///
/// The s-integral is split at the dyadic scales t = 2^-j. Each dyadic band is
/// synthesised spectrally from its exact spectral density
///
///   S(k) = pi * int e^{-s|k|^2/2} ds,
///
/// summed over lattice aliases when the band reaches the mesh scale, so the
/// grid values are the continuum field sampled at the vertices. Every band
/// draws from its own keyed white-noise sheets; a partial band is obtained by
/// a per-frequency Brownian bridge in the variance clock. Consequently two
/// calls with the same grid and seed are coupled exactly as nested integrals
/// of one white noise whenever their cut points lie in different dyadic bands.
///
/// Plane windows are embedded in a periodic box padded by six band lengths;
/// coarse bands use a box mesh of at most 1/16 of their length and are
/// resampled with cubic convolution. Tori use the full grid for every band,
/// which keeps the law exactly invariant under lattice translations.
///
/// The sampler precomputes all per-frequency coefficients, so one instance
/// serves an ensemble. sample() is const and thread-safe.
class WhiteNoiseSampler {
 public:
  WhiteNoiseSampler(const Grid& grid, double t_lo, double t_hi = 1.0);
  ~WhiteNoiseSampler();
  WhiteNoiseSampler(WhiteNoiseSampler&&) noexcept;
  WhiteNoiseSampler& operator=(WhiteNoiseSampler&&) noexcept;

  Field sample(RngSeed seed) const;
  const Grid& grid() const { return grid_; }
  ScaleRange scales() const { return {t_lo_, t_hi_}; }

 private:
  struct Band;
  Grid grid_;
  double t_lo_;
  double t_hi_;
  std::vector<std::unique_ptr<Band>> bands_;
};

/// h_{t_min} on the grid: the scale range (t_min, 1].
Field sample_wn_field(const Grid& grid, double t_min, RngSeed seed);

/// The scale range (t_lo, t_hi]; equals h_{t_lo} - h_{t_hi} in law and,
/// for the same seed, as a coupled difference (see WhiteNoiseSampler).
Field sample_wn_band(const Grid& grid, double t_lo, double t_hi, RngSeed seed);

/// Radius outside which the truncated field's heat kernels are killed.
inline constexpr double kTruncationRadius = 0.1;

/// Sampler for the truncated field: the white-noise decomposition with the
/// heat kernel of Brownian motion killed on leaving B(z, 1/10), cut off below t_min.
///
/// Each half-octave of t is realised as a direct convolution of an independent
/// white-noise sheet with the killed kernel evaluated at the sub-band's
/// geometric-mean scale and restricted to |x| < 1/10. The kernel is rescaled so
/// the sub-band's pointwise variance equals pi * int p_B(s; 0, 0) ds exactly.
/// Values at vertices 1/5 or more apart depend on disjoint noise, hence are
/// independent.
class TruncatedSampler {
 public:
  TruncatedSampler(const Grid& grid, double t_min);
  ~TruncatedSampler();
  TruncatedSampler(TruncatedSampler&&) noexcept;
  TruncatedSampler& operator=(TruncatedSampler&&) noexcept;

  Field sample(RngSeed seed) const;
  /// Pointwise variance of every sample.
  double variance() const { return variance_; }

 private:
  struct SubBand;
  Grid grid_;
  double t_min_;
  double variance_ = 0.0;
  std::size_t box_ = 0;
  std::size_t offset_ = 0;
  std::vector<std::unique_ptr<SubBand>> sub_bands_;
};

Field sample_truncated_field(const Grid& grid, RngSeed seed, double t_min);

/// Discrete Gaussian free field with zero boundary values. The interior
/// covariance is covariance_scale * (-Delta)^{-1}, with Delta the graph
/// Laplacian of the lattice. The default 2*pi matches the log-covariance
/// normalisation of the white-noise fields.
Field sample_zero_boundary_field(const Grid& grid, RngSeed seed,
                                 double covariance_scale = 2.0 * 3.14159265358979323846);

/// Interior values (row-major, interior_side^2 entries) of a zero-boundary
/// discrete GFF on a square with interior_side^2 interior vertices.
std::vector<double> dirichlet_gff_interior(std::size_t interior_side, Rng& rng,
                                           double covariance_scale);

/// f + alpha * log(1/|. - z0|), clamped at distance mesh/2 from z0.
Field add_log_singularity(const Field& f, double alpha, Point z0);

/// Mean of the bilinearly interpolated field over max(64, ceil(2 pi r / mesh))
/// equally spaced points of the circle of radius r about z.
double circle_average(const Field& f, Point z, double r);

namespace heat {

/// Positive zeros of J0, ascending.
std::span<const double> bessel_j0_zeros();

/// Transition density at y of planar Brownian motion started at the centre of
/// a disk of the given radius and killed on leaving it, after time u.
double killed_kernel(double u, double y, double radius);

/// killed_kernel(s, 0, radius): the density of returning to the start.
double killed_return_density(double s, double radius);

}  // namespace heat

/// Binary cache: "LQGF", u16 version, u8 topology, u32 n, f64 side, f64 t_min,
/// u8 kind, u64 seed master, u64 seed stream, n*n f64 values row-major.
/// All little-endian.
void write_field_cache(const Field& f, const std::filesystem::path& path);
Field read_field_cache(const std::filesystem::path& path);

}  // namespace lqgv
