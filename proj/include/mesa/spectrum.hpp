#pragma once

// Maximum-entropy PSD of an AR model,
//     S(f) = p_m dt / |sum_s a_s exp(2 pi i f s dt)|^2,
// and the inverse direction: autocorrelations recovered from a tabulated
// two-sided PSD by trapezoidal quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "core.hpp"
#include "fft.hpp"

namespace mesa {

/// n_freqs equally spaced frequencies over [0, Ny] or [-Ny, Ny], endpoints
/// included. Two-sided grids are exact mirror images about zero.
inline std::vector<double> frequency_grid(std::size_t n_freqs, double dt, Sided sided) {
  detail::require(n_freqs >= 2, "frequency_grid: need n_freqs >= 2");
  detail::require(std::isfinite(dt) && dt > 0.0, "frequency_grid: dt must be > 0");
  const double ny = 0.5 / dt;
  std::vector<double> f(n_freqs);
  if (sided == Sided::one_sided) {
    const double step = ny / static_cast<double>(n_freqs - 1);
    for (std::size_t i = 0; i < n_freqs; ++i) f[i] = step * static_cast<double>(i);
    f.back() = ny;
    return f;
  }
  // Offsets from the centre in half-steps: -(n-1), -(n-3), ..., n-1.
  const double half_step = ny / static_cast<double>(n_freqs - 1);
  for (std::size_t i = 0; i < n_freqs / 2; ++i) {
    const double v = half_step * static_cast<double>(n_freqs - 1 - 2 * i);
    f[i] = -v;
    f[n_freqs - 1 - i] = v;
  }
  if (n_freqs % 2 == 1) f[n_freqs / 2] = 0.0;
  f.front() = -ny;
  f.back() = ny;
  return f;
}

/// Number of one-sided grid points used when the caller gives no grid.
inline std::size_t default_grid_size(std::size_t order) {
  return 4 * std::max<std::size_t>(order, 256) + 1;
}

namespace detail {

// If `freqs` are integer multiples k_i * df of a spacing with 1/(df dt) an
// integer L >= order + 1, return L and the multiples.
struct FftGrid {
  std::size_t length;
  std::vector<long long> bins;
};

inline std::optional<FftGrid> match_fft_grid(std::span<const double> freqs, double dt,
                                             std::size_t order) {
  const std::size_t n = freqs.size();
  if (n < 3) return std::nullopt;
  const double df = (freqs.back() - freqs.front()) / static_cast<double>(n - 1);
  if (!(df > 0.0)) return std::nullopt;
  const double len_real = 1.0 / (df * dt);
  const double len = std::round(len_real);
  if (std::abs(len_real - len) > 1e-9 * len || len < static_cast<double>(order + 1) ||
      len > 1e9)
    return std::nullopt;
  FftGrid g{static_cast<std::size_t>(len), std::vector<long long>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double k = freqs[i] / df;
    const double kr = std::round(k);
    if (std::abs(k - kr) > 1e-7) return std::nullopt;
    g.bins[i] = static_cast<long long>(kr);
    if (static_cast<double>(std::llabs(g.bins[i])) * 2.0 > len) return std::nullopt;
  }
  return g;
}

}  // namespace detail

/// |sum_s a_s exp(2 pi i f s dt)|^2 by direct summation. Phases are reduced
/// in cycles before the trig call so high orders keep full accuracy.
inline double filter_gain_direct(std::span<const double> a, double f, double dt) {
  const double fd = f * dt;
  double re = 0.0, im = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    double cycles = fd * static_cast<double>(s);
    cycles -= std::round(cycles);
    const double phase = 2.0 * std::numbers::pi * cycles;
    re += a[s] * std::cos(phase);
    im += a[s] * std::sin(phase);
  }
  return re * re + im * im;
}

enum class PsdPath { automatic, direct, fft };

/// Two-sided MESA spectrum of `model` at `freqs` (each within [-Ny, Ny]).
inline SpectralDensity psd(const ArModel& model, std::span<const double> freqs,
                           PsdPath path = PsdPath::automatic) {
  const double dt = model.dt();
  const double ny = 0.5 / dt;
  for (double f : freqs)
    detail::require(std::abs(f) <= ny * (1.0 + 1e-12), "psd: frequency ", f,
                    " outside the Nyquist band [", -ny, ", ", ny, "]");
  const auto& a = model.a();
  const double scale = model.p_m() * dt;
  std::vector<double> values(freqs.size());

  std::optional<detail::FftGrid> grid;
  if (path != PsdPath::direct) grid = detail::match_fft_grid(freqs, dt, model.order());
  detail::require(path != PsdPath::fft || grid.has_value(),
                  "psd: frequencies do not form an FFT-compatible grid");

  if (grid) {
    const auto spectrum = fft::rfft(a, grid->length);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      const auto k = static_cast<std::size_t>(std::llabs(grid->bins[i]));
      values[i] = scale / std::norm(spectrum[k]);
    }
  } else {
    for (std::size_t i = 0; i < freqs.size(); ++i)
      values[i] = scale / filter_gain_direct(a, freqs[i], dt);
  }
  std::vector<double> f(freqs.begin(), freqs.end());
  for (double& x : f) x = std::clamp(x, -ny, ny);
  return SpectralDensity(std::move(f), std::move(values), Sided::two_sided, dt);
}

/// PSD on the default grid of the requested sidedness.
inline SpectralDensity psd(const ArModel& model, Sided sided,
                           std::optional<std::size_t> n_freqs = std::nullopt) {
  const std::size_t one_sided_n = n_freqs.value_or(default_grid_size(model.order()));
  if (sided == Sided::one_sided)
    return psd(model, frequency_grid(one_sided_n, model.dt(), Sided::one_sided))
        .to_one_sided();
  return psd(model, frequency_grid(2 * one_sided_n - 1, model.dt(), Sided::two_sided));
}

/// rho_k = integral over [-Ny, Ny] of S(f) exp(2 pi i f k dt) df, by the
/// trapezoid rule on the (uniform, two-sided) grid of `sd`.
inline std::vector<double> autocorr_from_psd(const SpectralDensity& sd,
                                             std::span<const long long> lags) {
  detail::require(sd.sided() == Sided::two_sided, "autocorr_from_psd: need a two-sided PSD");
  const auto& f = sd.freqs();
  const auto& s = sd.values();
  const std::size_t n = f.size();
  detail::require(n >= 3, "autocorr_from_psd: grid too small");
  const double ny = sd.nyquist();
  const double df = (f.back() - f.front()) / static_cast<double>(n - 1);
  detail::require(std::abs(f.front() + ny) <= 1e-9 * ny && std::abs(f.back() - ny) <= 1e-9 * ny,
                  "autocorr_from_psd: grid must span [-Ny, Ny]");
  for (std::size_t i = 0; i < n; ++i)
    detail::require(std::abs(f[i] - (f.front() + df * static_cast<double>(i))) <= 1e-6 * df,
                    "autocorr_from_psd: grid must be uniform");
  long long max_lag = 0;
  for (long long k : lags) max_lag = std::max(max_lag, std::llabs(k));
  if (static_cast<double>(n) < 8.0 * static_cast<double>(std::max<long long>(max_lag, 1)))
    throw AccuracyError("autocorr_from_psd: " + std::to_string(n) +
                        " grid points are too few for lag " + std::to_string(max_lag) +
                        " (need 8 per lag)");

  double total = 0.0;
  for (double v : s) total += v;
  total *= df;

  std::vector<double> rho(lags.size());
  const double dt = sd.dt();
  for (std::size_t j = 0; j < lags.size(); ++j) {
    const auto k = static_cast<double>(lags[j]);
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
      double cycles = f[i] * k * dt;
      cycles -= std::round(cycles);
      const double phase = 2.0 * std::numbers::pi * cycles;
      re += w * s[i] * std::cos(phase);
      im += w * s[i] * std::sin(phase);
    }
    re *= df;
    im *= df;
    if (std::abs(im) >= 1e-8 * std::abs(re) + 1e-12 * std::max(1.0, total))
      throw AccuracyError("autocorr_from_psd: non-negligible imaginary part at lag " +
                          std::to_string(lags[j]));
    rho[j] = re;
  }
  return rho;
}

/// Convenience overload for lags 0..max_lag.
inline std::vector<double> autocorr_from_psd(const SpectralDensity& sd, std::size_t max_lag) {
  std::vector<long long> lags(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) lags[k] = static_cast<long long>(k);
  return autocorr_from_psd(sd, lags);
}

}  // namespace mesa
