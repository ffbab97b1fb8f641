#pragma once

// Thin RAII layer over FFTW's real-data transforms.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <type_traits>
#include <span>
#include <vector>

#include "core.hpp"

namespace mesa::fft {

namespace detail {

// FFTW's planner is not thread-safe; execution of distinct plans is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

struct PlanDestroy {
  void operator()(fftw_plan p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

template <typename T>
using Buffer = std::unique_ptr<T[], FftwFree>;

}  // namespace detail

/// Forward DFT of `x` zero-padded (or truncated) to length n:
/// X_k = sum_t x_t exp(-2 pi i k t / n), k = 0 .. n/2.
inline std::vector<std::complex<double>> rfft(std::span<const double> x, std::size_t n) {
  mesa::detail::require(n >= 1, "rfft: length must be >= 1");
  const std::size_t bins = n / 2 + 1;
  detail::Buffer<double> in(fftw_alloc_real(n));
  detail::Buffer<fftw_complex> out(fftw_alloc_complex(bins));
  detail::Plan plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  for (std::size_t i = 0; i < n; ++i) in[i] = i < x.size() ? x[i] : 0.0;
  fftw_execute(plan.get());
  std::vector<std::complex<double>> result(bins);
  for (std::size_t k = 0; k < bins; ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

/// Unnormalised inverse of rfft for a Hermitian spectrum given by its
/// non-negative half (n/2 + 1 bins): x_t = sum_k X_k exp(2 pi i k t / n).
/// Imaginary parts of the DC and (even n) Nyquist bins are ignored.
inline std::vector<double> irfft(std::span<const std::complex<double>> half, std::size_t n) {
  const std::size_t bins = n / 2 + 1;
  mesa::detail::require(half.size() == bins, "irfft: expected ", bins, " bins, got ",
                        half.size());
  detail::Buffer<fftw_complex> in(fftw_alloc_complex(bins));
  detail::Buffer<double> out(fftw_alloc_real(n));
  detail::Plan plan;
  {
    std::lock_guard lock(detail::planner_mutex());
    plan.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
  }
  for (std::size_t k = 0; k < bins; ++k) {
    in[k][0] = half[k].real();
    in[k][1] = half[k].imag();
  }
  fftw_execute(plan.get());
  return std::vector<double>(out.get(), out.get() + n);
}

}  // namespace mesa::fft
