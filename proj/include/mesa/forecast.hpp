#pragma once

// Sampling future values from the conditional Gaussian of an AR model:
//     x_t | past ~ Normal(sum_i b_i x_{t-i}, noise_scale^2 * p_m).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "core.hpp"
#include "random.hpp"

namespace mesa {

struct ForecastOptions {
  std::size_t horizon = 1;
  std::size_t n_realizations = 1;
  std::uint64_t rng_seed = 0;
  double noise_scale = 1.0;
};

namespace detail {

inline std::vector<double> forecast_one(std::span<const double> a, std::span<const double> tail,
                                        std::size_t horizon, double sigma, Engine& rng) {
  const std::size_t m = a.size() - 1;
  // history holds the last m conditioning values followed by the generated ones
  std::vector<double> history(tail.begin(), tail.end());
  history.reserve(m + horizon);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t h = 0; h < horizon; ++h) {
    const std::size_t t = history.size();
    double mean = 0.0;
    for (std::size_t i = 1; i <= m; ++i) mean -= a[i] * history[t - i];
    const double eps = sigma > 0.0 ? sigma * noise(rng) : 0.0;
    history.push_back(mean + eps);
  }
  return std::vector<double>(history.end() - static_cast<std::ptrdiff_t>(horizon),
                             history.end());
}

}  // namespace detail

/// Draw `n_realizations` continuations of `seed`. Realization i uses its own
/// stream derived from (rng_seed, i).
inline ForecastEnsemble forecast(const ArModel& model, const TimeSeries& seed,
                                 const ForecastOptions& opt) {
  const std::size_t m = model.order();
  detail::require(seed.size() >= m, "forecast: seed has ", seed.size(),
                  " samples but the model order is ", m);
  detail::require(opt.horizon >= 1, "forecast: horizon must be >= 1");
  detail::require(opt.n_realizations >= 1, "forecast: n_realizations must be >= 1");
  detail::require(std::isfinite(opt.noise_scale) && opt.noise_scale >= 0.0,
                  "forecast: noise_scale must be >= 0");
  const auto tail = seed.samples().last(m);
  const double sigma = opt.noise_scale * std::sqrt(model.p_m());
  std::vector<std::vector<double>> out(opt.n_realizations);
  for (std::size_t i = 0; i < opt.n_realizations; ++i) {
    Engine rng = make_engine(opt.rng_seed, i, stream::forecast);
    out[i] = detail::forecast_one(model.a(), tail, opt.horizon, sigma, rng);
  }
  return ForecastEnsemble(std::move(out), seed.size(), model);
}

/// Type-7 empirical quantile (linear interpolation between order
/// statistics) of an already sorted sample.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  detail::require(!sorted.empty(), "quantile: empty sample");
  detail::require(q >= 0.0 && q <= 1.0, "quantile: q must lie in [0, 1]");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> sample, double q) {
  std::sort(sample.begin(), sample.end());
  return quantile_sorted(sample, q);
}

/// Per-step median and requested quantiles of a forecast ensemble.
struct QuantileTable {
  std::vector<double> quantiles;            // requested levels, in order
  std::vector<double> median;               // [step]
  std::vector<std::vector<double>> values;  // [step][level]
};

inline QuantileTable forecast_summary(const ForecastEnsemble& ens,
                                      std::span<const double> quantiles) {
  detail::require(ens.size() >= 2, "forecast_summary: need at least 2 realizations");
  for (double q : quantiles)
    detail::require(q > 0.0 && q < 1.0, "forecast_summary: quantile ", q,
                    " must lie in (0, 1)");
  QuantileTable table{std::vector<double>(quantiles.begin(), quantiles.end()), {}, {}};
  const std::size_t horizon = ens.horizon();
  table.median.resize(horizon);
  table.values.resize(horizon);
  std::vector<double> column(ens.size());
  for (std::size_t h = 0; h < horizon; ++h) {
    for (std::size_t i = 0; i < ens.size(); ++i) column[i] = ens.realizations()[i][h];
    std::sort(column.begin(), column.end());
    table.median[h] = quantile_sorted(column, 0.5);
    for (double q : quantiles) table.values[h].push_back(quantile_sorted(column, q));
  }
  return table;
}

}  // namespace mesa
