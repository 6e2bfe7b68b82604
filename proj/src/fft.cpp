#include "fft.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lqgv::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}


}  // namespace

RealBuffer alloc_real(std::size_t count) {
  RealBuffer p(fftw_alloc_real(count));
  if (!p) throw std::bad_alloc();
  return p;
}

ComplexBuffer alloc_complex(std::size_t count) {
  ComplexBuffer p(fftw_alloc_complex(count));
  if (!p) throw std::bad_alloc();
  return p;
}

const SquarePlans& square_plans(std::size_t m) {
  std::lock_guard lock(planner_mutex());
  static std::map<std::size_t, std::unique_ptr<SquarePlans>> cache;
  auto& slot = cache[m];
  if (!slot) {
    auto plans = std::make_unique<SquarePlans>();
    plans->m = m;
    auto real = alloc_real(m * m);
    auto spec = alloc_complex(m * (m / 2 + 1));
    const int side = static_cast<int>(m);
    plans->forward =
        fftw_plan_dft_r2c_2d(side, side, real.get(), spec.get(), FFTW_ESTIMATE);
    plans->backward =
        fftw_plan_dft_c2r_2d(side, side, spec.get(), real.get(), FFTW_ESTIMATE);
    if (!plans->forward || !plans->backward) {
      throw std::runtime_error("FFTW planning failed");
    }
    slot = std::move(plans);
  }
  return *slot;
}

fftw_plan dst1_plan(std::size_t m) {
  std::lock_guard lock(planner_mutex());
  static std::map<std::size_t, fftw_plan> cache;
  auto& slot = cache[m];
  if (!slot) {
    auto in = alloc_real(m * m);
    auto out = alloc_real(m * m);
    const int side = static_cast<int>(m);
    slot = fftw_plan_r2r_2d(side, side, in.get(), out.get(), FFTW_RODFT00, FFTW_RODFT00,
                            FFTW_ESTIMATE);
    if (!slot) throw std::runtime_error("FFTW planning failed");
  }
  return slot;
}

std::size_t fft_friendly(std::size_t m) {
  for (std::size_t c = std::max<std::size_t>(m, 1);; ++c) {
    std::size_t r = c;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return c;
  }
}

}  // namespace lqgv::detail
