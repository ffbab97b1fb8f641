#pragma once

// Welch's averaged-periodogram estimator with a Tukey taper.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "core.hpp"
#include "fft.hpp"

namespace mesa {

/// Segment lengths offered as presets for Welch comparisons.
inline constexpr std::size_t kWelchPresets[] = {512, 1024, 2048, 8192, 32768};

/// Symmetric Tukey (tapered cosine) window. alpha = 0 is rectangular,
/// alpha = 1 is Hann.
inline std::vector<double> tukey_window(std::size_t n, double alpha) {
  detail::require(n >= 1, "tukey_window: n must be >= 1");
  detail::require(alpha >= 0.0 && alpha <= 1.0, "tukey_window: alpha must lie in [0, 1], got ",
                  alpha);
  std::vector<double> w(n, 1.0);
  if (n == 1 || alpha == 0.0) return w;
  const double span = alpha * static_cast<double>(n - 1);
  const auto width = static_cast<std::size_t>(std::floor(span / 2.0));
  for (std::size_t i = 0; i <= width; ++i) {
    const double v =
        0.5 * (1.0 + std::cos(std::numbers::pi * (-1.0 + 2.0 * static_cast<double>(i) / span)));
    w[i] = v;
    w[n - 1 - i] = v;
  }
  return w;
}

struct WelchOptions {
  std::size_t segment_len = 1024;
  double overlap_fraction = 0.5;
  bool subtract_segment_mean = false;
};

/// One-sided Welch PSD: mean over segments of |DFT(w * segment)|^2 dt / sum w^2,
/// interior bins doubled. Trailing samples that do not fill a segment are dropped.
inline SpectralDensity welch_psd(const TimeSeries& ts, std::span<const double> window,
                                 const WelchOptions& opt) {
  const std::size_t len = opt.segment_len;
  detail::require(len >= 2, "welch_psd: segment length must be >= 2");
  detail::require(len <= ts.size(), "welch_psd: segment length ", len,
                  " exceeds series length ", ts.size());
  detail::require(opt.overlap_fraction >= 0.0 && opt.overlap_fraction < 1.0,
                  "welch_psd: overlap fraction must lie in [0, 1)");
  detail::require(window.size() == len, "welch_psd: window length ", window.size(),
                  " differs from segment length ", len);
  double w2 = 0.0;
  for (double w : window) w2 += w * w;
  detail::require(w2 > 0.0, "welch_psd: window is identically zero");

  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(static_cast<double>(len) * (1.0 - opt.overlap_fraction))));
  const std::size_t bins = len / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  std::vector<double> seg(len);
  std::size_t n_segments = 0;
  const auto x = ts.samples();
  for (std::size_t start = 0; start + len <= x.size(); start += hop) {
    double mean = 0.0;
    if (opt.subtract_segment_mean) {
      for (std::size_t i = 0; i < len; ++i) mean += x[start + i];
      mean /= static_cast<double>(len);
    }
    for (std::size_t i = 0; i < len; ++i) seg[i] = window[i] * (x[start + i] - mean);
    const auto spec = fft::rfft(seg, len);
    for (std::size_t k = 0; k < bins; ++k) acc[k] += std::norm(spec[k]);
    ++n_segments;
  }
  detail::require(n_segments >= 1, "welch_psd: fewer than one full segment");

  const double dt = ts.dt();
  const double scale = dt / (w2 * static_cast<double>(n_segments));
  std::vector<double> freqs(bins), values(bins);
  const bool even = len % 2 == 0;
  for (std::size_t k = 0; k < bins; ++k) {
    freqs[k] = static_cast<double>(k) / (static_cast<double>(len) * dt);
    const bool edge = k == 0 || (even && k == bins - 1);
    values[k] = acc[k] * scale * (edge ? 1.0 : 2.0);
  }
  if (even) freqs.back() = ts.nyquist();
  return SpectralDensity(std::move(freqs), std::move(values), Sided::one_sided, dt);
}

inline SpectralDensity welch_psd(const TimeSeries& ts, const WelchOptions& opt,
                                 double tukey_alpha = 0.4) {
  return welch_psd(ts, tukey_window(opt.segment_len, tukey_alpha), opt);
}

}  // namespace mesa
