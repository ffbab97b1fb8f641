#pragma once

// Synthetic data: Gaussian noise with a prescribed PSD (inverse-FFT of
// independent Fourier coefficients), direct AR(p) simulation, and random
// AR(p) models for order-recovery studies.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "estimator.hpp"
#include "fft.hpp"
#include "random.hpp"

namespace mesa {

/// A two-sided PSD target S(f), evaluated for f in [0, Ny] (the process is
/// real, so S(-f) = S(f)).
using PsdFunction = std::function<double(double)>;

/// Gaussian bump: S(f) = amplitude * exp(-(f - mean)^2 / (2 std^2)).
struct GaussianPsd {
  double mean = 2.5;
  double std = 0.5;
  double amplitude = 1.0;

  double operator()(double f) const {
    const double z = (f - mean) / std;
    return amplitude * std::exp(-0.5 * z * z);
  }
};

enum class Interpolation { linear, loglog };

inline Interpolation parse_interpolation(std::string_view s) {
  if (s == "linear") return Interpolation::linear;
  if (s == "loglog") return Interpolation::loglog;
  detail::fail("unknown interpolation '", s, "' (expected linear or loglog)");
}

/// One-sided tabulated PSD curve (the usual convention for published noise
/// curves). `two_sided(f)` halves values strictly inside (0, Ny) so that a
/// round trip through to_one_sided reproduces the table.
class TabulatedPsd {
 public:
  TabulatedPsd(std::vector<double> freqs, std::vector<double> values,
               Interpolation interp = Interpolation::linear)
      : f_(std::move(freqs)), v_(std::move(values)), interp_(interp) {
    detail::require(f_.size() >= 2 && f_.size() == v_.size(),
                    "TabulatedPsd: need >= 2 points and equal lengths");
    for (std::size_t i = 0; i < f_.size(); ++i) {
      detail::require(std::isfinite(f_[i]) && std::isfinite(v_[i]),
                      "TabulatedPsd: values must be finite");
      detail::require(v_[i] >= 0.0, "TabulatedPsd: negative PSD at f = ", f_[i]);
      if (i > 0)
        detail::require(f_[i] > f_[i - 1], "TabulatedPsd: frequencies must increase");
    }
    detail::require(f_.front() >= 0.0, "TabulatedPsd: frequencies must be >= 0");
    if (interp_ == Interpolation::loglog)
      for (std::size_t i = 0; i < f_.size(); ++i)
        detail::require(v_[i] > 0.0 && (f_[i] > 0.0 || i == 0),
                        "TabulatedPsd: loglog interpolation needs positive values");
  }

  const std::vector<double>& freqs() const { return f_; }
  const std::vector<double>& values() const { return v_; }
  Interpolation interpolation() const { return interp_; }

  /// One-sided value at f; constant extrapolation outside the table.
  double one_sided(double f) const {
    if (f <= f_.front()) return v_.front();
    if (f >= f_.back()) return v_.back();
    const auto it = std::upper_bound(f_.begin(), f_.end(), f);
    const std::size_t hi = static_cast<std::size_t>(it - f_.begin());
    const std::size_t lo = hi - 1;
    if (interp_ == Interpolation::loglog && f_[lo] > 0.0) {
      const double t = std::log(f / f_[lo]) / std::log(f_[hi] / f_[lo]);
      return std::exp(std::log(v_[lo]) + t * (std::log(v_[hi]) - std::log(v_[lo])));
    }
    const double t = (f - f_[lo]) / (f_[hi] - f_[lo]);
    return v_[lo] + t * (v_[hi] - v_[lo]);
  }

  /// Two-sided density at f for a process sampled at dt.
  double two_sided(double f, double dt) const {
    const double ny = 0.5 / dt;
    const double tol = 1e-12 * ny;
    const double v = one_sided(std::abs(f));
    return (std::abs(f) > tol && std::abs(f) < ny - tol) ? 0.5 * v : v;
  }

  PsdFunction as_function(double dt) const {
    return [table = *this, dt](double f) { return table.two_sided(f, dt); };
  }

 private:
  std::vector<double> f_;
  std::vector<double> v_;
  Interpolation interp_;
};

/// Hermitian half-spectrum (n/2 + 1 bins) with E|X_k|^2 = n S(f_k) / dt.
/// DC and Nyquist bins are real.
inline std::vector<std::complex<double>> draw_fourier_coefficients(const PsdFunction& target,
                                                                   std::size_t n, double dt,
                                                                   Engine& rng) {
  detail::require(n >= 2 && n % 2 == 0, "generate_from_psd: n must be even and >= 2, got ",
                  n);
  detail::require(std::isfinite(dt) && dt > 0.0, "generate_from_psd: dt must be > 0");
  const std::size_t bins = n / 2 + 1;
  const double df = 1.0 / (static_cast<double>(n) * dt);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::complex<double>> half(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double s = target(df * static_cast<double>(k));
    detail::require(std::isfinite(s) && s >= 0.0, "generate_from_psd: target PSD is ", s,
                    " at f = ", df * static_cast<double>(k));
    const double var = static_cast<double>(n) * s / dt;
    if (k == 0 || k == bins - 1) {
      half[k] = {std::sqrt(var) * gauss(rng), 0.0};
    } else {
      const double sd = std::sqrt(0.5 * var);
      const double re = sd * gauss(rng);
      const double im = sd * gauss(rng);
      half[k] = {re, im};
    }
  }
  return half;
}

/// n samples of zero-mean Gaussian noise whose expected periodogram is the
/// two-sided `target`.
inline TimeSeries generate_from_psd(const PsdFunction& target, std::size_t n, double dt,
                                    std::uint64_t rng_seed, std::uint64_t index = 0) {
  Engine rng = make_engine(rng_seed, index, stream::data);
  const auto half = draw_fourier_coefficients(target, n, dt, rng);
  auto x = fft::irfft(half, n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& v : x) v *= inv_n;
  return TimeSeries(std::move(x), dt);
}

/// Default burn-in: 10 samples per AR lag.
inline std::size_t default_burn_in(std::size_t order) { return 10 * order; }

/// Simulate x_t = sum b_i x_{t-i} + nu_t, nu ~ Normal(0, p_m), from a zero
/// state; the first `burn_in` samples are discarded.
inline TimeSeries generate_ar(const ArModel& model, std::size_t n, std::size_t burn_in,
                              std::uint64_t rng_seed, std::uint64_t index = 0) {
  detail::require(n >= 2, "generate_ar: n must be >= 2");
  detail::require(is_stable(model.a()), "generate_ar: model of order ", model.order(),
                  " is not stable");
  const auto& a = model.a();
  const std::size_t m = model.order();
  const std::size_t total = n + burn_in;
  Engine rng = make_engine(rng_seed, index, stream::data);
  std::normal_distribution<double> gauss(0.0, std::sqrt(model.p_m()));
  // Ring buffer over the last m values; newest at position head-1.
  std::vector<double> out;
  out.reserve(n);
  std::vector<double> ring(std::max<std::size_t>(m, 1), 0.0);
  std::size_t head = 0;
  const bool noisy = model.p_m() > 0.0;
  for (std::size_t t = 0; t < total; ++t) {
    double x = noisy ? gauss(rng) : 0.0;
    for (std::size_t i = 1; i <= m; ++i) x -= a[i] * ring[(head + m - i) % m];
    if (m > 0) {
      ring[head] = x;
      head = (head + 1) % m;
    }
    if (t >= burn_in) out.push_back(x);
  }
  return TimeSeries(std::move(out), model.dt());
}

/// Random stable AR model: order log-uniform on [p_min, p_max], coefficient
/// magnitudes from a flat Dirichlet, independent fair-coin signs; draws are
/// rejected until stable. p_m = 1, dt = 1.
///
/// The magnitudes sum to one, so an all-positive or sign-alternating draw has
/// a root exactly at z = 1 or z = -1. Rounding can leave such a draw with
/// |c| a few ulps below one, hence the margin on the stability test.
inline ArModel random_ar_model(std::uint64_t rng_seed, std::size_t p_min, std::size_t p_max,
                               std::uint64_t index = 0, std::size_t max_attempts = 10000) {
  detail::require(p_min >= 2 && p_min <= p_max, "random_ar_model: need 2 <= p_min <= p_max");
  Engine rng = make_engine(rng_seed, index, stream::model);
  std::uniform_real_distribution<double> log_p(std::log(static_cast<double>(p_min)),
                                               std::log(static_cast<double>(p_max)));
  const auto p = static_cast<std::size_t>(std::clamp<double>(
      std::round(std::exp(log_p(rng))), static_cast<double>(p_min), static_cast<double>(p_max)));
  std::exponential_distribution<double> gamma1(1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> a(p + 1);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    double total = 0.0;
    for (std::size_t k = 1; k <= p; ++k) {
      a[k] = gamma1(rng);
      total += a[k];
    }
    a[0] = 1.0;
    for (std::size_t k = 1; k <= p; ++k) {
      const double b = a[k] / total;  // AR coefficient magnitude
      a[k] = coin(rng) ? -b : b;
    }
    if (is_stable(a, 1e-6)) return ArModel(a, 1.0, 1.0);
  }
  throw GenerationError("random_ar_model: no stable model of order " + std::to_string(p) +
                        " after " + std::to_string(max_attempts) + " attempts");
}

}  // namespace mesa
