#pragma once

// Thin RAII layer over FFTW. Plans are created once per size and kept for the
// lifetime of the process. Planning is serialised under one mutex; executing a
// plan on fresh arrays is thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>

namespace lqgv::detail {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer alloc_real(std::size_t count);
ComplexBuffer alloc_complex(std::size_t count);

/// Square 2-D real<->half-complex transforms of side m.
struct SquarePlans {
  std::size_t m = 0;
  fftw_plan forward = nullptr;   // r2c
  fftw_plan backward = nullptr;  // c2r, unnormalised
  std::size_t spectrum_size() const { return m * (m / 2 + 1); }
};

const SquarePlans& square_plans(std::size_t m);

/// 2-D DST-I (RODFT00 in both directions) of side m.
fftw_plan dst1_plan(std::size_t m);

/// Smallest integer >= m whose only prime factors are 2, 3, 5, 7.
std::size_t fft_friendly(std::size_t m);

}  // namespace lqgv::detail
