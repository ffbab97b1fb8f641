#pragma once

// Error metrics and reusable experiment harnesses: Gaussian-PSD recovery,
// AR order recovery, and a MESA-vs-Welch comparison on synthetic data.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "baseline.hpp"
#include "core.hpp"
#include "estimator.hpp"
#include "forecast.hpp"
#include "parallel.hpp"
#include "selection.hpp"
#include "spectrum.hpp"
#include "synth.hpp"

namespace mesa {

namespace detail {

inline void require_same_grid(const SpectralDensity& a, const SpectralDensity& b) {
  require(a.size() == b.size(), "grid mismatch: ", a.size(), " vs ", b.size(), " points");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double fa = a.freqs()[i], fb = b.freqs()[i];
    require(std::abs(fa - fb) <= 1e-12 * std::max({1.0, std::abs(fa), std::abs(fb)}),
            "grid mismatch at index ", i, ": ", fa, " vs ", fb);
  }
}

inline void require_positive_truth(const SpectralDensity& truth) {
  for (std::size_t i = 0; i < truth.size(); ++i)
    require(truth.values()[i] > 0.0, "truth PSD must be strictly positive (zero at f = ",
            truth.freqs()[i], ")");
}

}  // namespace detail

/// Frequency-averaged relative error: mean_j |S_est(f_j) - S(f_j)| / S(f_j).
inline double relative_error_freq_avg(const SpectralDensity& estimate,
                                      const SpectralDensity& truth) {
  detail::require_same_grid(estimate, truth);
  detail::require_positive_truth(truth);
  double acc = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j)
    acc += std::abs(estimate.values()[j] - truth.values()[j]) / truth.values()[j];
  return acc / static_cast<double>(truth.size());
}

/// Ensemble-averaged relative error per frequency:
/// r(f) = mean_i |S_i(f) - S(f)| / S(f).
inline SpectralDensity relative_error_ensemble(std::span<const SpectralDensity> estimates,
                                               const SpectralDensity& truth) {
  detail::require(!estimates.empty(), "relative_error_ensemble: no estimates");
  detail::require_positive_truth(truth);
  std::vector<double> r(truth.size(), 0.0);
  for (const auto& est : estimates) {
    detail::require_same_grid(est, truth);
    for (std::size_t j = 0; j < truth.size(); ++j)
      r[j] += std::abs(est.values()[j] - truth.values()[j]) / truth.values()[j];
  }
  for (double& v : r) v /= static_cast<double>(estimates.size());
  return SpectralDensity(truth.freqs(), std::move(r), truth.sided(), truth.dt());
}

// ---------------------------------------------------------------------------
// Gaussian-PSD experiment

struct GaussianExperimentConfig {
  std::size_t n_realizations = 100;
  std::size_t n_samples = 3000;
  double dt = 0.125;  // Ny = 4 = mean + 3 std of the default bump
  PsdFunction target = GaussianPsd{};
  Criterion criterion = Criterion::fpe;
  EstimatorMethod method = EstimatorMethod::burg;
  std::uint64_t rng_seed = 0;
  std::size_t n_freqs = 0;  // one-sided grid size; 0 means n_samples / 2 + 1
  std::optional<EarlyStopConfig> early_stop;
};

struct RealizationRecord {
  std::size_t index = 0;
  std::size_t order = 0;
  double error = 0.0;
  bool operator==(const RealizationRecord&) const = default;
};

struct GaussianExperimentResult {
  std::vector<RealizationRecord> records;
  SpectralDensity truth;       // target on the evaluation grid
  SpectralDensity mean_psd;    // ensemble mean of the estimates
  SpectralDensity median_psd;
  SpectralDensity lower_psd;   // 5% quantile per frequency
  SpectralDensity upper_psd;   // 95% quantile per frequency
  SpectralDensity error_curve; // ensemble-averaged relative error
};

/// Generate, fit, select and score `n_realizations` series. Realization i
/// draws its data from stream (rng_seed, i), so results do not depend on the
/// worker count.
inline GaussianExperimentResult run_gaussian_experiment(const GaussianExperimentConfig& cfg) {
  detail::require(cfg.n_realizations >= 1, "gaussian experiment: need n_realizations >= 1");
  const std::size_t nf = cfg.n_freqs ? cfg.n_freqs : cfg.n_samples / 2 + 1;
  const auto grid = frequency_grid(nf, cfg.dt, Sided::one_sided);
  std::vector<double> truth_values(nf);
  for (std::size_t j = 0; j < nf; ++j) truth_values[j] = cfg.target(grid[j]);
  SpectralDensity truth(grid, truth_values, Sided::two_sided, cfg.dt);

  std::vector<SpectralDensity> estimates(cfg.n_realizations, truth);
  std::vector<RealizationRecord> records(cfg.n_realizations);
  parallel_for(cfg.n_realizations, [&](std::size_t i) {
    const TimeSeries ts = generate_from_psd(cfg.target, cfg.n_samples, cfg.dt, cfg.rng_seed, i);
    const Estimate est = estimate(ts, cfg.criterion, cfg.method, std::nullopt, cfg.early_stop);
    estimates[i] = psd(est.model, grid);
    records[i] = {i, est.selection.chosen_order(), relative_error_freq_avg(estimates[i], truth)};
  });

  std::vector<double> mean(nf, 0.0), med(nf), lo(nf), hi(nf), column(cfg.n_realizations);
  for (std::size_t j = 0; j < nf; ++j) {
    for (std::size_t i = 0; i < cfg.n_realizations; ++i) {
      column[i] = estimates[i].values()[j];
      mean[j] += column[i];
    }
    mean[j] /= static_cast<double>(cfg.n_realizations);
    std::sort(column.begin(), column.end());
    med[j] = quantile_sorted(column, 0.5);
    lo[j] = quantile_sorted(column, 0.05);
    hi[j] = quantile_sorted(column, 0.95);
  }
  auto curve = [&](std::vector<double> v) {
    return SpectralDensity(grid, std::move(v), Sided::two_sided, cfg.dt);
  };
  SpectralDensity errors = relative_error_ensemble(estimates, truth);
  return {std::move(records), truth,           curve(std::move(mean)), curve(std::move(med)),
          curve(std::move(lo)), curve(std::move(hi)), std::move(errors)};
}

// ---------------------------------------------------------------------------
// Order recovery on random AR(p) processes

inline constexpr std::array<Criterion, 3> kAllCriteria = {Criterion::fpe, Criterion::cat,
                                                          Criterion::obd};

struct OrderRecoveryConfig {
  std::size_t n_models = 50;
  std::size_t p_min = 2;
  std::size_t p_max = 500;
  std::size_t n_samples = 30000;
  std::uint64_t rng_seed = 0;
  EstimatorMethod method = EstimatorMethod::burg;
};

struct OrderRecoveryRecord {
  std::size_t index = 0;
  std::size_t p_true = 0;
  std::size_t m_max = 0;
  std::array<std::size_t, 3> p_hat{};  // indexed like kAllCriteria
  bool operator==(const OrderRecoveryRecord&) const = default;

  std::size_t estimate_for(Criterion c) const {
    return p_hat[static_cast<std::size_t>(c == Criterion::fpe ? 0 : c == Criterion::cat ? 1 : 2)];
  }
};

/// Burn-in long enough for the slowest mode to forget the zero start:
/// max(10 p, 50 / (1 - max|c|)), capped at 10^6 samples.
inline std::size_t recommended_burn_in(const ArModel& model) {
  double cmax = 0.0;
  for (double c : reflection_from_coefficients(model.a())) cmax = std::max(cmax, std::abs(c));
  const double mixing = 50.0 / std::max(1e-6, 1.0 - cmax);
  return std::min<std::size_t>(
      1000000, std::max(default_burn_in(model.order()), static_cast<std::size_t>(mixing)));
}

/// Feed one recursion to several order scanners at once; each stops on its
/// own early-stop rule and the recursion ends when all have stopped.
inline std::vector<OrderSelection> select_orders(const TimeSeries& ts,
                                                 std::span<const Criterion> criteria,
                                                 EstimatorMethod method, std::size_t bound) {
  const EarlyStopConfig es = EarlyStopConfig::defaults_for(bound);
  ArRecursion rec(ts, method);
  std::vector<OrderScanner> scanners;
  std::vector<bool> active(criteria.size(), true);
  for (Criterion c : criteria) scanners.emplace_back(c, ts.size(), es);
  std::size_t remaining = criteria.size();
  for (std::size_t m = 0; m <= bound && remaining > 0; ++m) {
    if (m > 0) rec.step();
    for (std::size_t i = 0; i < scanners.size(); ++i) {
      if (!active[i]) continue;
      if (!scanners[i].push(m, rec.power(), rec.coefficients())) {
        active[i] = false;
        --remaining;
      }
    }
  }
  std::vector<OrderSelection> out;
  for (const auto& s : scanners) out.push_back(s.result());
  return out;
}

inline std::vector<OrderRecoveryRecord> run_order_recovery(const OrderRecoveryConfig& cfg) {
  std::vector<OrderRecoveryRecord> records(cfg.n_models);
  parallel_for(cfg.n_models, [&](std::size_t i) {
    const ArModel model = random_ar_model(cfg.rng_seed, cfg.p_min, cfg.p_max, i);
    const TimeSeries ts =
        generate_ar(model, cfg.n_samples, recommended_burn_in(model), cfg.rng_seed, i);
    const std::size_t bound = max_order(ts.size());
    const auto sel = select_orders(ts, kAllCriteria, cfg.method, bound);
    OrderRecoveryRecord r{i, model.order(), bound, {}};
    for (std::size_t k = 0; k < sel.size(); ++k) r.p_hat[k] = sel[k].chosen_order();
    records[i] = r;
  });
  return records;
}

// ---------------------------------------------------------------------------
// MESA vs Welch on a shared synthetic series

struct ComparisonConfig {
  double duration = 5.0;        // seconds
  double sample_rate = 4096.0;  // Hz
  WelchOptions welch{1024, 0.5, false};
  double tukey_alpha = 0.4;
  Criterion criterion = Criterion::fpe;
  EstimatorMethod method = EstimatorMethod::burg;
  std::uint64_t rng_seed = 0;
  std::uint64_t index = 0;
};

struct ComparisonResult {
  SpectralDensity truth;  // one-sided, on the Welch grid
  SpectralDensity mesa;   // one-sided, on the Welch grid
  SpectralDensity welch;
  std::size_t mesa_order = 0;
  double mesa_error = 0.0;
  double welch_error = 0.0;
};

/// Both estimators see the same series drawn from `target` (a two-sided
/// PSD function); errors are frequency-averaged relative errors on the
/// Welch grid, all spectra one-sided.
inline ComparisonResult compare_with_welch(const PsdFunction& target,
                                           const ComparisonConfig& cfg) {
  const double dt = 1.0 / cfg.sample_rate;
  auto n = static_cast<std::size_t>(std::llround(cfg.duration * cfg.sample_rate));
  n -= n % 2;
  const TimeSeries ts = generate_from_psd(target, n, dt, cfg.rng_seed, cfg.index);
  SpectralDensity welch = welch_psd(ts, cfg.welch, cfg.tukey_alpha);
  const Estimate est = estimate(ts, cfg.criterion, cfg.method);
  SpectralDensity mesa_psd = psd(est.model, welch.freqs()).to_one_sided();
  std::vector<double> tv(welch.size());
  for (std::size_t j = 0; j < tv.size(); ++j) tv[j] = target(welch.freqs()[j]);
  SpectralDensity truth =
      SpectralDensity(welch.freqs(), std::move(tv), Sided::two_sided, dt).to_one_sided();
  const double e_mesa = relative_error_freq_avg(mesa_psd, truth);
  const double e_welch = relative_error_freq_avg(welch, truth);
  return {std::move(truth), std::move(mesa_psd), std::move(welch), est.selection.chosen_order(),
          e_mesa, e_welch};
}

}  // namespace mesa
