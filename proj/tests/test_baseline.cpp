#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mesa/baseline.hpp"
#include "mesa/random.hpp"
#include "oracles.hpp"

using namespace mesa;

namespace {

TimeSeries white(std::size_t n, double dt, std::uint64_t seed) {
  Engine rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return TimeSeries(std::move(x), dt);
}

double trapezoid(const SpectralDensity& sd) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < sd.size(); ++i)
    acc += 0.5 * (sd.values()[i] + sd.values()[i + 1]) * (sd.freqs()[i + 1] - sd.freqs()[i]);
  return acc;
}

}  // namespace

TEST(TukeyWindow, LimitingCases) {
  for (double v : tukey_window(16, 0.0)) EXPECT_EQ(v, 1.0);
  const auto hann = tukey_window(7, 1.0);
  EXPECT_NEAR(hann.front(), 0.0, 1e-15);
  EXPECT_NEAR(hann.back(), 0.0, 1e-15);
  EXPECT_NEAR(hann[3], 1.0, 1e-15);
  for (std::size_t i = 0; i < 7; ++i)
    EXPECT_NEAR(hann[i], 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / 6.0),
                1e-15);
  EXPECT_EQ(tukey_window(1, 0.5), std::vector<double>{1.0});
}

TEST(TukeyWindow, HandValues) {
  const auto w = tukey_window(8, 0.5);
  // Taper span alpha (n - 1) = 3.5: w[1] = (1 + cos(pi (-1 + 2/3.5))) / 2.
  const double w1 = 0.5 * (1.0 + std::cos(std::numbers::pi * (-1.0 + 2.0 / 3.5)));
  EXPECT_NEAR(w1, 0.6112604669781572, 1e-15);
  const std::vector<double> expected{0.0, w1, 1.0, 1.0, 1.0, 1.0, w1, 0.0};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(w[i], expected[i], 1e-15);
  const auto w10 = tukey_window(10, 0.4);
  EXPECT_NEAR(w10[1], 0.5868240888334653, 1e-15);
  EXPECT_EQ(w10[2], 1.0);
}

TEST(TukeyWindow, SymmetricAndBounded) {
  for (std::size_t n : {5u, 64u, 1024u, 1025u})
    for (double alpha : {0.1, 0.4, 0.75, 1.0}) {
      const auto w = tukey_window(n, alpha);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_EQ(w[i], w[n - 1 - i]);
        EXPECT_GE(w[i], 0.0);
        EXPECT_LE(w[i], 1.0);
      }
    }
}

TEST(TukeyWindow, Errors) {
  EXPECT_THROW(tukey_window(0, 0.5), ValidationError);
  EXPECT_THROW(tukey_window(8, -0.1), ValidationError);
  EXPECT_THROW(tukey_window(8, 1.1), ValidationError);
}

TEST(Welch, WhiteNoiseLevel) {
  const double dt = 1.0 / 4096.0;
  const auto ts = white(1u << 17, dt, 1);
  const auto sd = welch_psd(ts, WelchOptions{1024, 0.5, false}, 0.4);
  double mean = 0.0;
  for (std::size_t k = 1; k + 1 < sd.size(); ++k) mean += sd.values()[k];
  mean /= static_cast<double>(sd.size() - 2);
  EXPECT_NEAR(mean / (2.0 * dt), 1.0, 0.03);
}

TEST(Welch, ParsevalWithinFivePercent) {
  const auto ts = white(1u << 16, 0.01, 2);
  const auto sd = welch_psd(ts, WelchOptions{1024, 0.5, false}, 0.4);
  double var = 0.0;
  for (double v : ts.values()) var += v * v;
  var /= static_cast<double>(ts.size());
  EXPECT_NEAR(trapezoid(sd) / var, 1.0, 0.05);
}

TEST(Welch, SinePeakLocation) {
  const double fs = 1024.0;
  std::vector<double> x(8192);
  for (std::size_t t = 0; t < x.size(); ++t)
    x[t] = std::sin(2.0 * std::numbers::pi * 50.0 * static_cast<double>(t) / fs);
  const auto sd = welch_psd(TimeSeries(x, 1.0 / fs), WelchOptions{256, 0.5, false}, 0.4);
  std::size_t best = 0;
  for (std::size_t k = 0; k < sd.size(); ++k)
    if (sd.values()[k] > sd.values()[best]) best = k;
  EXPECT_LE(std::abs(sd.freqs()[best] - 50.0), fs / 256.0);
}

TEST(Welch, ZeroSignal) {
  const auto sd = welch_psd(TimeSeries(std::vector<double>(4096, 0.0), 1.0), WelchOptions{512, 0.5, false});
  for (double v : sd.values()) EXPECT_EQ(v, 0.0);
}

TEST(Welch, WindowScaleInvariance) {
  const auto ts = white(8192, 0.5, 3);
  const WelchOptions opt{512, 0.5, false};
  const auto w = tukey_window(512, 0.4);
  std::vector<double> w3(w);
  for (auto& v : w3) v *= 3.7;
  const auto a = welch_psd(ts, w, opt);
  const auto b = welch_psd(ts, w3, opt);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(b.values()[k], a.values()[k], 1e-12 * a.values()[k]);
}

TEST(Welch, SingleRectangularSegmentIsRawPeriodogram) {
  const double dt = 0.25;
  const auto ts = white(256, dt, 4);
  const auto sd = welch_psd(ts, std::vector<double>(256, 1.0), WelchOptions{256, 0.0, false});
  const auto pg = oracle::naive_periodogram(ts.values());
  ASSERT_EQ(sd.size(), pg.size());
  for (std::size_t k = 0; k < pg.size(); ++k) {
    const double factor = (k == 0 || k == pg.size() - 1) ? 1.0 : 2.0;
    const double expected = factor * pg[k] * dt / 256.0;
    EXPECT_NEAR(sd.values()[k], expected, 1e-10 * std::max(expected, 1e-3));
    EXPECT_NEAR(sd.freqs()[k], static_cast<double>(k) / (256.0 * dt), 1e-12);
  }
  EXPECT_EQ(sd.freqs().back(), ts.nyquist());
}

TEST(Welch, SegmentCountAndTrailingDrop) {
  // Series of 1000 samples, segment 256, hop 128: segments start at
  // 0, 128, ..., 640 (six segments); samples past 896 are dropped, so
  // perturbing them leaves the estimate unchanged.
  auto x = white(1000, 1.0, 5).values();
  const WelchOptions opt{256, 0.5, false};
  const auto a = welch_psd(TimeSeries(x, 1.0), opt);
  for (std::size_t t = 896; t < 1000; ++t) x[t] += 10.0;
  const auto b = welch_psd(TimeSeries(x, 1.0), opt);
  EXPECT_EQ(a.values(), b.values());
}

TEST(Welch, SegmentMeanSubtraction) {
  auto x = white(4096, 1.0, 6).values();
  for (auto& v : x) v += 5.0;
  const auto raw = welch_psd(TimeSeries(x, 1.0), WelchOptions{512, 0.5, false});
  const auto det = welch_psd(TimeSeries(x, 1.0), WelchOptions{512, 0.5, true});
  EXPECT_GT(raw.values()[0], 100.0 * det.values()[0]);
}

TEST(Welch, Errors) {
  const auto ts = white(100, 1.0, 7);
  EXPECT_THROW(welch_psd(ts, WelchOptions{128, 0.5, false}), ValidationError);
  EXPECT_THROW(welch_psd(ts, WelchOptions{64, 1.0, false}), ValidationError);
  EXPECT_THROW(welch_psd(ts, std::vector<double>(32, 1.0), WelchOptions{64, 0.5, false}),
               ValidationError);
  EXPECT_THROW(welch_psd(ts, std::vector<double>(64, 0.0), WelchOptions{64, 0.5, false}),
               ValidationError);
}

TEST(Welch, Presets) {
  EXPECT_EQ(std::size(kWelchPresets), 5u);
  EXPECT_EQ(kWelchPresets[0], 512u);
  EXPECT_EQ(kWelchPresets[4], 32768u);
}
