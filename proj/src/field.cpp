#include "lqgv/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"

namespace lqgv {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (!std::isfinite(values[v])) {
      std::ostringstream msg;
      msg << what << ": non-finite value at vertex " << v;
      throw NumericError(msg.str());
    }
  }
}

void check_cutoff(const Grid& grid, double t_lo, double t_hi) {
  const double t_floor = minimum_cutoff(grid);
  if (!(t_lo > 0.0) || !(t_hi <= 1.0) || !(t_lo <= t_hi)) {
    throw std::invalid_argument("scale range must satisfy 0 < t_lo <= t_hi <= 1");
  }
  if (t_lo < t_floor) {
    std::ostringstream msg;
    msg << "cutoff t=" << t_lo << " is below the mesh resolution; minimum admissible cutoff is "
        << t_floor << " (mesh/4)";
    throw std::invalid_argument(msg.str());
  }
}

/// Keys cubic convolution kernel (a = -1/2) weights for nodes -1, 0, 1, 2.
std::array<double, 4> cubic_weights(double f) {
  auto near = [](double x) { return (1.5 * x - 2.5) * x * x + 1.0; };
  auto far = [](double x) { return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0; };
  return {far(1.0 + f), near(f), near(1.0 - f), far(2.0 - f)};
}

/// Spectral mass pi * int_{s1}^{s2} e^{-s|k|^2/2} ds, summed over lattice aliases.
double band_clock(double s1, double s2, double kx, double ky, double alias_step,
                  int aliases) {
  double total = 0.0;
  for (int ax = -aliases; ax <= aliases; ++ax) {
    for (int ay = -aliases; ay <= aliases; ++ay) {
      const double qx = kx + alias_step * ax;
      const double qy = ky + alias_step * ay;
      const double kk = qx * qx + qy * qy;
      if (kk == 0.0) {
        total += kPi * (s2 - s1);
      } else {
        total += 2.0 * kPi / kk * std::exp(-0.5 * s1 * kk) * -std::expm1(-0.5 * (s2 - s1) * kk);
      }
    }
  }
  return total;
}

void fill_normals(double* out, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) out[i] = rng.normal();
}

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(std::size_t order, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  for (std::size_t i = 0; i < order; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(order) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(order) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Field

Field::Field(Grid grid, std::vector<double> values, ScaleRange scales, FieldKind kind,
             RngSeed seed)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      scales_(scales),
      kind_(kind),
      seed_(seed) {
  if (values_.size() != grid_.vertex_count()) {
    throw std::invalid_argument("Field: value count does not match the grid");
  }
  require_finite(values_, "Field");
}

double Field::interpolate(Point p) const {
  const std::size_t n = grid_.n();
  const double h = grid_.mesh();
  double u = (p.x - grid_.origin().x) / h;
  double w = (p.y - grid_.origin().y) / h;
  if (grid_.is_torus()) {
    const auto nd = static_cast<double>(n);
    u = std::fmod(u, nd);
    w = std::fmod(w, nd);
    if (u < 0.0) u += nd;
    if (w < 0.0) w += nd;
    auto i0 = static_cast<std::size_t>(u);
    auto j0 = static_cast<std::size_t>(w);
    if (i0 >= n) i0 = n - 1;
    if (j0 >= n) j0 = n - 1;
    const double fu = u - static_cast<double>(i0);
    const double fw = w - static_cast<double>(j0);
    const std::size_t i1 = (i0 + 1) % n;
    const std::size_t j1 = (j0 + 1) % n;
    return (1.0 - fw) * ((1.0 - fu) * at(i0, j0) + fu * at(i1, j0)) +
           fw * ((1.0 - fu) * at(i0, j1) + fu * at(i1, j1));
  }
  const double last = static_cast<double>(n - 1);
  constexpr double slack = 1e-9;
  if (!(u >= -slack && u <= last + slack && w >= -slack && w <= last + slack)) {
    throw std::invalid_argument("Field::interpolate: point outside the window");
  }
  u = std::clamp(u, 0.0, last);
  w = std::clamp(w, 0.0, last);
  const auto i0 = std::min(static_cast<std::size_t>(u), n - 2);
  const auto j0 = std::min(static_cast<std::size_t>(w), n - 2);
  const double fu = u - static_cast<double>(i0);
  const double fw = w - static_cast<double>(j0);
  return (1.0 - fw) * ((1.0 - fu) * at(i0, j0) + fu * at(i0 + 1, j0)) +
         fw * ((1.0 - fu) * at(i0, j0 + 1) + fu * at(i0 + 1, j0 + 1));
}

Field Field::shifted(double c) const {
  std::vector<double> out(values_.size());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = values_[v] + c;
  return Field(grid_, std::move(out), scales_, FieldKind::Composite, seed_);
}

Field constant_field(const Grid& grid, double c) {
  return Field(grid, std::vector<double>(grid.vertex_count(), c), ScaleRange{1.0, 1.0},
               FieldKind::Composite, RngSeed{});
}

double minimum_cutoff(const Grid& grid) { return 0.25 * grid.mesh(); }

// ---------------------------------------------------------------------------
// White-noise decomposition

struct WhiteNoiseSampler::Band {
  std::uint64_t index = 0;
  std::size_t m = 0;
  double h = 0.0;
  bool aligned = true;
  std::size_t offset = 0;  // aligned: box node holding window vertex (0, 0)
  double pad = 0.0;        // resampled: window origin minus box node 0
  std::vector<double> coef_a;
  std::vector<double> coef_z;
  std::vector<double> coef_c;
  const detail::SquarePlans* plans = nullptr;
};

WhiteNoiseSampler::WhiteNoiseSampler(const Grid& grid, double t_lo, double t_hi)
    : grid_(grid), t_lo_(t_lo), t_hi_(t_hi) {
  check_cutoff(grid, t_lo, t_hi);
  const std::size_t n = grid.n();
  const double delta = grid.mesh();
  constexpr double kNodesPerBandLength = 16.0;
  constexpr double kPadBandLengths = 6.0;

  for (std::uint64_t j = 0;; ++j) {
    const double band_hi = std::ldexp(1.0, -static_cast<int>(j));
    const double band_lo = 0.5 * band_hi;
    if (band_hi <= t_lo) break;
    const double lo = std::max(t_lo, band_lo);
    const double hi = std::min(t_hi, band_hi);
    if (!(lo < hi)) continue;

    auto band = std::make_unique<Band>();
    band->index = j;
    if (grid.is_torus()) {
      band->m = n;
      band->h = delta;
    } else {
      const double pad_total = kPadBandLengths * band_hi;
      const double h_target = band_hi / kNodesPerBandLength;
      if (h_target <= delta) {
        band->h = delta;
        band->m = detail::fft_friendly(n + static_cast<std::size_t>(std::ceil(pad_total / delta)));
        band->offset = (band->m - n) / 2;
      } else {
        band->aligned = false;
        band->h = h_target;
        band->m = detail::fft_friendly(
            static_cast<std::size_t>(std::ceil((grid.side() + pad_total) / h_target)) + 4);
        band->pad = 0.5 * (static_cast<double>(band->m) * h_target - grid.side());
      }
    }
    band->plans = &detail::square_plans(band->m);

    const std::size_t m = band->m;
    const std::size_t half = m / 2 + 1;
    const double h = band->h;
    const double sa = band_lo * band_lo;
    const double sb = band_hi * band_hi;
    const double s_lo = lo * lo;
    const double s_hi = hi * hi;
    const bool cut_low = lo > band_lo;
    const bool cut_high = hi < band_hi;
    // Aliases beyond `aliases` carry less than e^-39 of the band's spectrum.
    int aliases = 0;
    while (0.5 * sa * std::pow((2.0 * aliases + 1.0) * kPi / h, 2) <= 39.0) ++aliases;
    const double alias_step = 2.0 * kPi / h;
    const double dk = 2.0 * kPi / (static_cast<double>(m) * h);
    const double norm = 1.0 / (h * static_cast<double>(m) * static_cast<double>(m));

    band->coef_a.assign(m * half, 0.0);
    if (cut_low != cut_high) band->coef_z.assign(m * half, 0.0);
    if (cut_low && cut_high) band->coef_c.assign(m * half, 0.0);

    for (std::size_t p = 0; p < m; ++p) {
      const double kx = dk * (p <= m / 2 ? static_cast<double>(p)
                                         : static_cast<double>(p) - static_cast<double>(m));
      for (std::size_t q = 0; q < half; ++q) {
        const double ky = dk * static_cast<double>(q);
        const std::size_t idx = p * half + q;
        if (cut_low && cut_high) {
          band->coef_c[idx] = norm * std::sqrt(band_clock(s_lo, s_hi, kx, ky, alias_step, aliases));
          continue;
        }
        const double full = band_clock(sa, sb, kx, ky, alias_step, aliases);
        if (!(full > 0.0)) continue;
        if (!cut_low && !cut_high) {
          band->coef_a[idx] = norm * std::sqrt(full);
          continue;
        }
        // Brownian bridge in the variance clock, measured downward from sb.
        const double tau = cut_low ? band_clock(s_lo, sb, kx, ky, alias_step, aliases)
                                   : band_clock(s_hi, sb, kx, ky, alias_step, aliases);
        const double root = std::sqrt(full);
        const double bridge = std::sqrt(std::max(0.0, tau * (full - tau) / full));
        if (cut_low) {
          band->coef_a[idx] = norm * tau / root;
          band->coef_z[idx] = norm * bridge;
        } else {
          band->coef_a[idx] = norm * (full - tau) / root;
          band->coef_z[idx] = -norm * bridge;
        }
      }
    }
    bands_.push_back(std::move(band));
  }
}

WhiteNoiseSampler::~WhiteNoiseSampler() = default;
WhiteNoiseSampler::WhiteNoiseSampler(WhiteNoiseSampler&&) noexcept = default;
WhiteNoiseSampler& WhiteNoiseSampler::operator=(WhiteNoiseSampler&&) noexcept = default;

Field WhiteNoiseSampler::sample(RngSeed seed) const {
  const std::size_t n = grid_.n();
  std::vector<double> out(n * n, 0.0);

  for (const auto& band_ptr : bands_) {
    const Band& band = *band_ptr;
    const std::size_t m = band.m;
    const std::size_t spec_size = band.plans->spectrum_size();
    auto real = detail::alloc_real(m * m);
    auto noise_hat = detail::alloc_complex(spec_size);
    auto spec = detail::alloc_complex(spec_size);
    for (std::size_t i = 0; i < spec_size; ++i) spec[i][0] = spec[i][1] = 0.0;

    auto accumulate = [&](Purpose purpose, const std::vector<double>& coef) {
      if (coef.empty()) return;
      Rng rng(seed, purpose, band.index);
      fill_normals(real.get(), m * m, rng);
      fftw_execute_dft_r2c(band.plans->forward, real.get(), noise_hat.get());
      for (std::size_t i = 0; i < spec_size; ++i) {
        spec[i][0] += coef[i] * noise_hat[i][0];
        spec[i][1] += coef[i] * noise_hat[i][1];
      }
    };
    accumulate(Purpose::FieldBand, band.coef_a);
    accumulate(Purpose::FieldBridge, band.coef_z);
    accumulate(Purpose::FieldFresh, band.coef_c);
    fftw_execute_dft_c2r(band.plans->backward, spec.get(), real.get());

    if (band.aligned) {
      for (std::size_t j = 0; j < n; ++j) {
        const double* row = real.get() + (j + band.offset) * m + band.offset;
        double* dst = out.data() + j * n;
        for (std::size_t i = 0; i < n; ++i) dst[i] += row[i];
      }
      continue;
    }
    // Cubic resampling onto the fine vertices.
    const double ratio = grid_.mesh() / band.h;
    const double shift = band.pad / band.h;
    std::vector<std::size_t> base(n);
    std::vector<std::array<double, 4>> weights(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = shift + ratio * static_cast<double>(i);
      const double fl = std::floor(u);
      base[i] = static_cast<std::size_t>(fl) - 1;
      weights[i] = cubic_weights(u - fl);
    }
    for (std::size_t j = 0; j < n; ++j) {
      double* dst = out.data() + j * n;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t r = 0; r < 4; ++r) {
          const double* row = real.get() + (base[j] + r) * m + base[i];
          const auto& wx = weights[i];
          acc += weights[j][r] * (wx[0] * row[0] + wx[1] * row[1] + wx[2] * row[2] + wx[3] * row[3]);
        }
        dst[i] += acc;
      }
    }
  }
  require_finite(out, "sample_wn_field");
  return Field(grid_, std::move(out), ScaleRange{t_lo_, t_hi_}, FieldKind::WhiteNoise, seed);
}

Field sample_wn_field(const Grid& grid, double t_min, RngSeed seed) {
  return WhiteNoiseSampler(grid, t_min, 1.0).sample(seed);
}

Field sample_wn_band(const Grid& grid, double t_lo, double t_hi, RngSeed seed) {
  return WhiteNoiseSampler(grid, t_lo, t_hi).sample(seed);
}

// ---------------------------------------------------------------------------
// Killed heat kernels

namespace heat {

std::span<const double> bessel_j0_zeros() {
  static const std::vector<double> zeros = [] {
    std::vector<double> z;
    for (int k = 1; k <= 96; ++k) {
      const double beta = (k - 0.25) * kPi;
      double x = beta + 1.0 / (8.0 * beta) - 124.0 / (3.0 * std::pow(8.0 * beta, 3));
      for (int iter = 0; iter < 50; ++iter) {
        const double dx = std::cyl_bessel_j(0.0, x) / std::cyl_bessel_j(1.0, x);
        x += dx;
        if (std::abs(dx) < 1e-15 * x) break;
      }
      z.push_back(x);
    }
    return z;
  }();
  return zeros;
}

namespace {

// Killing matters only once R^2 / (2u) drops below this; above it the free
// kernel agrees to ~e^-37.
constexpr double kFreeRegime = 37.0;

}  // namespace

double killed_kernel(double u, double y, double radius) {
  if (y >= radius) return 0.0;
  const double r2 = radius * radius;
  if (r2 / (2.0 * u) > kFreeRegime) {
    return std::exp(-y * y / (2.0 * u)) / (2.0 * kPi * u);
  }
  double total = 0.0;
  for (double j : bessel_j0_zeros()) {
    const double decay = j * j * u / (2.0 * r2);
    if (decay > 45.0) break;
    const double j1 = std::cyl_bessel_j(1.0, j);
    total += std::cyl_bessel_j(0.0, j * y / radius) * std::exp(-decay) / (kPi * r2 * j1 * j1);
  }
  return total;
}

double killed_return_density(double s, double radius) { return killed_kernel(s, 0.0, radius); }

}  // namespace heat

// ---------------------------------------------------------------------------
// Truncated field

struct TruncatedSampler::SubBand {
  std::uint64_t index = 0;
  std::vector<double> kernel_hat;  // interleaved re/im, normalised for the c2r pass
};

TruncatedSampler::TruncatedSampler(const Grid& grid, double t_min) : grid_(grid), t_min_(t_min) {
  if (grid.side() < 1.0) {
    throw std::invalid_argument("truncated field needs a window side of at least 1");
  }
  check_cutoff(grid, t_min, 1.0);
  const double delta = grid.mesh();
  const double radius = kTruncationRadius;
  const auto reach = static_cast<std::size_t>(std::ceil(radius / delta));
  const std::size_t n = grid.n();
  if (grid.is_torus()) {
    box_ = n;
    offset_ = 0;
  } else {
    box_ = detail::fft_friendly(n + 2 * reach);
    offset_ = reach;
  }
  const auto& plans = detail::square_plans(box_);
  const std::size_t m = box_;
  const std::size_t spec_size = plans.spectrum_size();

  // Beyond s = 0.15 the killed kernel has decayed by e^-40.
  const double t_top = std::min(1.0, std::sqrt(0.15));
  std::vector<double> bounds{t_min};
  while (bounds.back() < t_top) bounds.push_back(std::min(t_top, bounds.back() * std::numbers::sqrt2));
  if (t_min >= t_top) bounds.resize(1);

  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre(16, gl_nodes, gl_weights);

  auto kernel = detail::alloc_real(m * m);
  auto kernel_hat = detail::alloc_complex(spec_size);
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    const double sa = bounds[b] * bounds[b];
    const double sb = bounds[b + 1] * bounds[b + 1];
    // pi * int_{sa}^{sb} p_B(s; 0, 0) ds, integrated in log s.
    const double la = std::log(sa);
    const double lb = std::log(sb);
    double band_variance = 0.0;
    for (std::size_t k = 0; k < gl_nodes.size(); ++k) {
      const double ls = 0.5 * (la + lb) + 0.5 * (lb - la) * gl_nodes[k];
      const double s = std::exp(ls);
      band_variance += 0.5 * (lb - la) * gl_weights[k] * s * heat::killed_return_density(s, radius);
    }
    band_variance *= kPi;

    const double u = 0.5 * std::sqrt(sa * sb);
    std::fill(kernel.get(), kernel.get() + m * m, 0.0);
    double norm2 = 0.0;
    const auto r = static_cast<std::ptrdiff_t>(reach);
    const auto md = static_cast<std::ptrdiff_t>(m);
    for (std::ptrdiff_t a = -r; a <= r; ++a) {
      for (std::ptrdiff_t c = -r; c <= r; ++c) {
        const double y = delta * std::hypot(static_cast<double>(a), static_cast<double>(c));
        if (!(y < radius)) continue;
        const double value = heat::killed_kernel(u, y, radius);
        const std::size_t row = static_cast<std::size_t>((c % md + md) % md);
        const std::size_t col = static_cast<std::size_t>((a % md + md) % md);
        kernel[row * m + col] = value;
        norm2 += value * value * delta * delta;
      }
    }
    const double scale = std::sqrt(band_variance / norm2) * delta / static_cast<double>(m * m);
    for (std::size_t i = 0; i < m * m; ++i) kernel[i] *= scale;
    fftw_execute_dft_r2c(plans.forward, kernel.get(), kernel_hat.get());

    auto sub = std::make_unique<SubBand>();
    sub->index = b;
    sub->kernel_hat.resize(2 * spec_size);
    for (std::size_t i = 0; i < spec_size; ++i) {
      sub->kernel_hat[2 * i] = kernel_hat[i][0];
      sub->kernel_hat[2 * i + 1] = kernel_hat[i][1];
    }
    sub_bands_.push_back(std::move(sub));
    variance_ += band_variance;
  }
}

TruncatedSampler::~TruncatedSampler() = default;
TruncatedSampler::TruncatedSampler(TruncatedSampler&&) noexcept = default;
TruncatedSampler& TruncatedSampler::operator=(TruncatedSampler&&) noexcept = default;

Field TruncatedSampler::sample(RngSeed seed) const {
  const std::size_t n = grid_.n();
  const std::size_t m = box_;
  const auto& plans = detail::square_plans(m);
  const std::size_t spec_size = plans.spectrum_size();
  auto real = detail::alloc_real(m * m);
  auto noise_hat = detail::alloc_complex(spec_size);
  auto spec = detail::alloc_complex(spec_size);
  for (std::size_t i = 0; i < spec_size; ++i) spec[i][0] = spec[i][1] = 0.0;

  for (const auto& sub : sub_bands_) {
    Rng rng(seed, Purpose::TruncatedBand, sub->index);
    fill_normals(real.get(), m * m, rng);
    fftw_execute_dft_r2c(plans.forward, real.get(), noise_hat.get());
    const double* k = sub->kernel_hat.data();
    for (std::size_t i = 0; i < spec_size; ++i) {
      const double kr = k[2 * i];
      const double ki = k[2 * i + 1];
      spec[i][0] += kr * noise_hat[i][0] - ki * noise_hat[i][1];
      spec[i][1] += kr * noise_hat[i][1] + ki * noise_hat[i][0];
    }
  }
  std::vector<double> out(n * n, 0.0);
  if (!sub_bands_.empty()) {
    fftw_execute_dft_c2r(plans.backward, spec.get(), real.get());
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        out[j * n + i] = real[(j + offset_) * m + i + offset_];
      }
    }
  }
  require_finite(out, "sample_truncated_field");
  return Field(grid_, std::move(out), ScaleRange{t_min_, 1.0}, FieldKind::WhiteNoiseTruncated,
               seed);
}

Field sample_truncated_field(const Grid& grid, RngSeed seed, double t_min) {
  return TruncatedSampler(grid, t_min).sample(seed);
}

// ---------------------------------------------------------------------------
// Zero-boundary discrete GFF

std::vector<double> dirichlet_gff_interior(std::size_t m, Rng& rng, double covariance_scale) {
  if (m == 0) return {};
  if (!(covariance_scale > 0.0)) {
    throw std::invalid_argument("zero-boundary field: covariance scale must be positive");
  }
  const double denom = static_cast<double>(m + 1);
  auto coeffs = detail::alloc_real(m * m);
  auto values = detail::alloc_real(m * m);
  std::vector<double> eig(m);
  for (std::size_t p = 0; p < m; ++p) {
    eig[p] = 2.0 - 2.0 * std::cos(kPi * static_cast<double>(p + 1) / denom);
  }
  for (std::size_t q = 0; q < m; ++q) {
    for (std::size_t p = 0; p < m; ++p) {
      coeffs[q * m + p] = std::sqrt(covariance_scale / (eig[p] + eig[q])) * rng.normal();
    }
  }
  fftw_execute_r2r(detail::dst1_plan(m), coeffs.get(), values.get());
  // Orthonormal sine basis is (2/(m+1)) sin sin; RODFT00 carries a factor 4.
  const double scale = 0.5 / denom;
  std::vector<double> out(m * m);
  for (std::size_t i = 0; i < m * m; ++i) out[i] = scale * values[i];
  return out;
}

Field sample_zero_boundary_field(const Grid& grid, RngSeed seed, double covariance_scale) {
  if (grid.is_torus()) {
    throw std::invalid_argument("zero-boundary field needs a plane window, not a torus");
  }
  const std::size_t n = grid.n();
  const std::size_t m = n - 2;
  Rng rng(seed, Purpose::ZeroBoundary, 0);
  const std::vector<double> interior = dirichlet_gff_interior(m, rng, covariance_scale);
  std::vector<double> out(n * n, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      out[(j + 1) * n + (i + 1)] = interior[j * m + i];
    }
  }
  require_finite(out, "sample_zero_boundary_field");
  return Field(grid, std::move(out), ScaleRange{}, FieldKind::ZeroBoundary, seed);
}

// ---------------------------------------------------------------------------

Field add_log_singularity(const Field& f, double alpha, Point z0) {
  const Grid& grid = f.grid();
  if (!grid.contains(z0)) throw std::invalid_argument("log singularity centre outside the window");
  if (!(alpha < kQ)) {
    std::ostringstream msg;
    msg << "log singularity alpha=" << alpha << " must be below Q=" << kQ;
    throw std::invalid_argument(msg.str());
  }
  if (alpha == 0.0) return f;
  const double floor_radius = 0.5 * grid.mesh();
  std::vector<double> out(f.values().begin(), f.values().end());
  for (VertexId v = 0; v < out.size(); ++v) {
    const double r = std::max(grid.distance(z0, grid.position(v)), floor_radius);
    out[v] += -alpha * std::log(r);
  }
  return Field(grid, std::move(out), f.scales(), FieldKind::Composite, f.seed());
}

double circle_average(const Field& f, Point z, double r) {
  const Grid& grid = f.grid();
  if (!(r >= 2.0 * grid.mesh())) {
    throw std::invalid_argument("circle_average: radius must be at least twice the mesh");
  }
  if (grid.is_torus()) {
    if (!(2.0 * r < grid.side())) throw std::invalid_argument("circle_average: circle wraps the torus");
  } else {
    const Point o = grid.origin();
    if (z.x - r < o.x || z.y - r < o.y || z.x + r > o.x + grid.side() ||
        z.y + r > o.y + grid.side()) {
      throw std::invalid_argument("circle_average: circle leaves the window");
    }
  }
  const auto count = std::max<std::size_t>(
      64, static_cast<std::size_t>(std::ceil(2.0 * kPi * r / grid.mesh())));
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(count);
    sum += f.interpolate({z.x + r * std::cos(theta), z.y + r * std::sin(theta)});
  }
  return sum / static_cast<double>(count);
}

}  // namespace lqgv
