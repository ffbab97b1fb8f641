#include <gtest/gtest.h>

#include <cmath>

#include "mesa/forecast.hpp"
#include "mesa/synth.hpp"

using namespace mesa;

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

std::vector<double> column(const ForecastEnsemble& ens, std::size_t h) {
  std::vector<double> out;
  for (const auto& r : ens.realizations()) out.push_back(r[h]);
  return out;
}

}  // namespace

TEST(Forecast, NoiselessRecursion) {
  const ArModel m({1.0, -0.5}, 1.0, 1.0);
  const TimeSeries seed({3.0, 2.0, 1.0}, 1.0);
  const auto ens = forecast(m, seed, {3, 4, 7, 0.0});
  ASSERT_EQ(ens.size(), 4u);
  for (const auto& r : ens.realizations()) EXPECT_EQ(r, (std::vector<double>{0.5, 0.25, 0.125}));
  EXPECT_EQ(ens.seed_length(), 3u);
}

TEST(Forecast, OrderZeroNoiselessIsZero) {
  const ArModel m({1.0}, 2.0, 1.0);
  const auto ens = forecast(m, TimeSeries({5.0, 6.0}, 1.0), {5, 3, 1, 0.0});
  for (const auto& r : ens.realizations())
    for (double v : r) EXPECT_EQ(v, 0.0);
}

TEST(Forecast, OneStepMonteCarlo) {
  const ArModel m({1.0, -0.5}, 1.0, 1.0);
  const TimeSeries seed({0.0, 2.0}, 1.0);
  const auto ens = forecast(m, seed, {1, 100000, 21, 1.0});
  const auto x = column(ens, 0);
  EXPECT_NEAR(mean_of(x), 1.0, 3.0 / std::sqrt(1e5));
  EXPECT_NEAR(variance_of(x), 1.0, 0.02);
}

TEST(Forecast, NoiseScaleMultipliesSigma) {
  const ArModel m({1.0}, 4.0, 1.0);
  const auto ens = forecast(m, TimeSeries({0.0, 0.0}, 1.0), {1, 50000, 2, 0.5});
  EXPECT_NEAR(variance_of(column(ens, 0)), 0.25 * 4.0, 0.03);
}

TEST(Forecast, Errors) {
  const ArModel m({1.0, -0.5, 0.1, 0.1}, 1.0, 1.0);
  EXPECT_THROW(forecast(m, TimeSeries({1.0, 2.0}, 1.0), {1, 1, 0, 1.0}), ValidationError);
  const ArModel m1({1.0, -0.5}, 1.0, 1.0);
  EXPECT_THROW(forecast(m1, TimeSeries({1.0, 2.0}, 1.0), {0, 1, 0, 1.0}), ValidationError);
  EXPECT_THROW(forecast(m1, TimeSeries({1.0, 2.0}, 1.0), {1, 0, 0, 1.0}), ValidationError);
  EXPECT_THROW(forecast(m1, TimeSeries({1.0, 2.0}, 1.0), {1, 1, 0, -1.0}), ValidationError);
}

TEST(Forecast, Deterministic) {
  const ArModel m({1.0, -0.9}, 1.0, 1.0);
  const TimeSeries seed({1.0, 2.0, 3.0}, 1.0);
  const auto a = forecast(m, seed, {20, 50, 99, 1.0});
  const auto b = forecast(m, seed, {20, 50, 99, 1.0});
  EXPECT_EQ(a.realizations(), b.realizations());
  const auto c = forecast(m, seed, {20, 50, 100, 1.0});
  EXPECT_NE(a.realizations(), c.realizations());
}

TEST(Forecast, RealizationStreamsAreIndependentOfEnsembleSize) {
  const ArModel m({1.0, -0.9}, 1.0, 1.0);
  const TimeSeries seed({1.0, 2.0}, 1.0);
  const auto small = forecast(m, seed, {10, 5, 3, 1.0});
  const auto large = forecast(m, seed, {10, 50, 3, 1.0});
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(small.realizations()[i], large.realizations()[i]);
}

TEST(Forecast, PredictiveSpreadGrowsWithHorizon) {
  const ArModel m({1.0, -0.9}, 1.0, 1.0);
  const auto ens = forecast(m, TimeSeries({0.0, 1.0}, 1.0), {30, 10000, 8, 1.0});
  double prev = 0.0;
  for (std::size_t h = 0; h < 30; ++h) {
    const double sd = std::sqrt(variance_of(column(ens, h)));
    // Allow Monte Carlo noise of a few standard errors on the sd estimate.
    EXPECT_GE(sd, prev * (1.0 - 3.0 / std::sqrt(2.0 * 10000.0))) << h;
    prev = sd;
    // Theoretical sd after h+1 steps: sqrt(sum_{j<=h} 0.81^j).
    const double theory = std::sqrt((1.0 - std::pow(0.81, static_cast<double>(h + 1))) / 0.19);
    EXPECT_NEAR(sd, theory, 0.05 * theory) << h;
  }
}

TEST(Forecast, OneStepResidualVarianceOfTrueModel) {
  std::vector<double> a{1.0};
  for (double c : {0.5, -0.4, 0.3}) a = levinson_step(a, 1.0, c).first;
  const ArModel m(a, 1.7, 1.0);
  const auto ts = generate_ar(m, 100000, 1000, 4);
  const auto x = ts.values();
  std::vector<double> resid;
  for (std::size_t t = 3; t < x.size(); ++t) {
    double e = x[t];
    for (std::size_t i = 1; i <= 3; ++i) e += a[i] * x[t - i];
    resid.push_back(e);
  }
  EXPECT_NEAR(variance_of(resid), 1.7, 0.03 * 1.7);
}

TEST(Forecast, IntervalCoverageCalibrated) {
  // 90% band from 200 forecast draws, checked against one held-out
  // continuation of the same process per trial.
  const ArModel m({1.0, -0.7}, 1.0, 1.0);
  const std::size_t trials = 10000;
  std::size_t covered = 0;
  const std::vector<double> levels{0.05, 0.95};
  for (std::size_t t = 0; t < trials; ++t) {
    const auto path = generate_ar(m, 52, 100, 500, t);
    const TimeSeries seed(std::vector<double>(path.values().begin(), path.values().begin() + 50),
                          1.0);
    const auto ens = forecast(m, seed, {2, 200, 900 + t, 1.0});
    const auto table = forecast_summary(ens, levels);
    const double truth = path.values()[51];
    covered += truth >= table.values[1][0] && truth <= table.values[1][1];
  }
  const double rate = static_cast<double>(covered) / static_cast<double>(trials);
  EXPECT_NEAR(rate, 0.90, 0.02);
}

TEST(Quantile, Type7) {
  const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({4.0, 1.0, 3.0, 2.0}, 0.75), 3.25);
  EXPECT_THROW(quantile_sorted(std::vector<double>{}, 0.5), ValidationError);
  EXPECT_THROW(quantile_sorted(s, 1.5), ValidationError);
}

TEST(ForecastSummary, Examples) {
  const ArModel m({1.0}, 1.0, 1.0);
  const ForecastEnsemble same({{2.0, 3.0}, {2.0, 3.0}, {2.0, 3.0}}, 2, m);
  const std::vector<double> q{0.05, 0.95};
  const auto t1 = forecast_summary(same, q);
  for (std::size_t h = 0; h < 2; ++h) {
    EXPECT_EQ(t1.median[h], h == 0 ? 2.0 : 3.0);
    for (double v : t1.values[h]) EXPECT_EQ(v, t1.median[h]);
  }
  const ForecastEnsemble two({{0.0, 0.0}, {1.0, 1.0}}, 2, m);
  const std::vector<double> half{0.5};
  const auto t2 = forecast_summary(two, half);
  EXPECT_EQ(t2.median, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(t2.values[0][0], 0.5);
}

TEST(ForecastSummary, Errors) {
  const ArModel m({1.0}, 1.0, 1.0);
  const ForecastEnsemble one({{2.0}}, 2, m);
  const std::vector<double> q{0.5};
  EXPECT_THROW(forecast_summary(one, q), ValidationError);
  const ForecastEnsemble two({{0.0}, {1.0}}, 2, m);
  const std::vector<double> bad{1.0};
  EXPECT_THROW(forecast_summary(two, bad), ValidationError);
}
