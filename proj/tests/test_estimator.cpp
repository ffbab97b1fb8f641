#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mesa/estimator.hpp"
#include "mesa/synth.hpp"
#include "oracles.hpp"

using namespace mesa;

namespace {

TimeSeries white_noise(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  Engine rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return TimeSeries(std::move(x), 1.0);
}

}  // namespace

TEST(SampleAutocorrelation, HandExamples) {
  const auto r = sample_autocorrelation(TimeSeries({1.0, -1.0, 1.0, -1.0}, 1.0), 1);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r[0], 1.0);
  EXPECT_DOUBLE_EQ(r[1], -0.75);

  const auto z = sample_autocorrelation(TimeSeries({0.0, 0.0, 0.0, 0.0}, 1.0), 2);
  EXPECT_EQ(z, (std::vector<double>{0.0, 0.0, 0.0}));
}

TEST(SampleAutocorrelation, ConstantSeriesClosedForm) {
  const double c = 1.7;
  const std::size_t n = 9;
  const auto r = sample_autocorrelation(TimeSeries(std::vector<double>(n, c), 1.0), n - 1);
  for (std::size_t k = 0; k < n; ++k)
    EXPECT_NEAR(r[k], c * c * static_cast<double>(n - k) / static_cast<double>(n), 1e-14);
}

TEST(SampleAutocorrelation, BoundedByLagZero) {
  const auto ts = white_noise(500, 3);
  const auto r = sample_autocorrelation(ts, 499);
  EXPECT_GE(r[0], 0.0);
  for (double v : r) EXPECT_LE(std::abs(v), r[0]);
  EXPECT_THROW(sample_autocorrelation(ts, 500), ValidationError);
}

TEST(ReflectionYuleWalker, Examples) {
  const std::vector<double> one{1.0};
  EXPECT_DOUBLE_EQ(reflection_yule_walker(one, std::vector<double>{1.0, 0.5}, 1.0), -0.5);
  EXPECT_DOUBLE_EQ(reflection_yule_walker(one, std::vector<double>{2.0, 0.0}, 2.0), 0.0);
  // Exact AR(1) with b = 0.5: r_k = r_0 0.5^k gains nothing at order 2.
  const std::vector<double> r{1.0, 0.5, 0.25};
  EXPECT_NEAR(reflection_yule_walker(std::vector<double>{1.0, -0.5}, r, 0.75), 0.0, 1e-15);
}

TEST(ReflectionYuleWalker, Errors) {
  EXPECT_THROW(reflection_yule_walker(std::vector<double>{1.0}, std::vector<double>{1.0, 0.5}, 0.0),
               DegenerateModelError);
  EXPECT_THROW(reflection_yule_walker(std::vector<double>{1.0, 0.1}, std::vector<double>{1.0, 0.5}, 1.0),
               ValidationError);
}

TEST(ReflectionBurg, Examples) {
  const std::vector<double> f{0.3, -1.2, 2.0};
  EXPECT_DOUBLE_EQ(reflection_burg(f, f), -1.0);
  EXPECT_DOUBLE_EQ(reflection_burg(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}), 0.0);
  EXPECT_DOUBLE_EQ(reflection_burg(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, -1.0}), 0.0);
  EXPECT_THROW(reflection_burg(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0}),
               DegenerateModelError);
}

TEST(ReflectionBurg, BoundedByOne) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> f(7), b(7);
    for (auto& v : f) v = g(rng);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = (trial % 3 == 0 ? -f[i] : g(rng));
    EXPECT_LE(std::abs(reflection_burg(f, b)), 1.0);
  }
}

TEST(Fit, ArgumentErrors) {
  const auto ts = white_noise(10, 1);
  EXPECT_THROW(fit(ts, 0), ValidationError);
  EXPECT_THROW(fit(ts, 10), ValidationError);
  EXPECT_NO_THROW(fit(ts, 9));
  EXPECT_THROW(fit(TimeSeries(std::vector<double>(16, 0.0), 1.0), 3), DegenerateModelError);
}

TEST(Fit, TraceInvariants) {
  const auto ts = white_noise(400, 5);
  for (auto method : {EstimatorMethod::burg, EstimatorMethod::yule_walker}) {
    const auto tr = fit(ts, 40, method);
    EXPECT_DOUBLE_EQ(tr.p()[0], sample_autocorrelation(ts, 0)[0]);
    for (std::size_t k = 0; k < tr.c().size(); ++k) {
      EXPECT_LE(std::abs(tr.c()[k]), 1.0);
      EXPECT_LE(tr.p()[k + 1], tr.p()[k]);
      EXPECT_EQ(tr.p()[k + 1], tr.p()[k] * (1.0 - tr.c()[k] * tr.c()[k]));
    }
    // Every order's filter has its roots outside the unit circle.
    for (std::size_t m : {1u, 5u, 20u, 40u})
      EXPECT_GT(oracle::min_root_modulus(tr.coefficients(m)), 1.0);
  }
}

TEST(Fit, LeanRetentionReplaysToSameVectors) {
  const auto ts = white_noise(300, 8);
  const auto full = fit(ts, 25, EstimatorMethod::burg, Retention::all_orders);
  const auto lean = fit(ts, 25, EstimatorMethod::burg, Retention::final_only);
  EXPECT_FALSE(lean.all_orders_retained());
  EXPECT_EQ(lean.p(), full.p());
  EXPECT_EQ(lean.c(), full.c());
  for (std::size_t m = 0; m <= 25; ++m) EXPECT_EQ(lean.coefficients(m), full.coefficients(m));
}

TEST(Fit, YuleWalkerSatisfiesNormalEquations) {
  const auto ts = white_noise(256, 21);
  const std::size_t m_max = 12;
  const auto tr = fit(ts, m_max, EstimatorMethod::yule_walker);
  const auto r = sample_autocorrelation(ts, m_max);
  for (std::size_t m = 1; m <= m_max; ++m) {
    const auto a = tr.coefficients(m);
    for (std::size_t row = 0; row <= m; ++row) {
      double acc = 0.0;
      for (std::size_t s = 0; s <= m; ++s) acc += a[s] * r[row > s ? row - s : s - row];
      const double expected = row == 0 ? tr.p()[m] : 0.0;
      EXPECT_NEAR(acc, expected, 1e-9 * r[0]) << "order " << m << " row " << row;
    }
  }
}

TEST(Fit, YuleWalkerMatchesDenseToeplitzSolve) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = oracle::random_pd_autocorrelation(rng, 31, 400);
    // Build a series whose biased autocorrelation is not needed; feed r
    // through the recursion directly.
    std::vector<double> a{1.0};
    double p = r[0];
    for (std::size_t m = 1; m <= 30; ++m) {
      const double c = reflection_yule_walker(a, r, p);
      std::tie(a, p) = levinson_step(a, p, c);
      const auto [ref, pref] = oracle::toeplitz_solve(r, m);
      double scale = 0.0;
      for (double v : ref) scale = std::max(scale, std::abs(v));
      for (std::size_t s = 0; s <= m; ++s) EXPECT_NEAR(a[s], ref[s], 1e-10 * scale);
      EXPECT_NEAR(p, pref, 1e-10 * pref);
    }
  }
}

TEST(Fit, WhiteNoiseHasNoStructure) {
  const auto ts = white_noise(100000, 77);
  const auto tr = fit(ts, 5);
  for (double c : tr.c()) EXPECT_LT(std::abs(c), 0.02);
  EXPECT_NEAR(tr.p()[5] / tr.p()[0], 1.0, 0.02);
}

TEST(Fit, RecoversAr1) {
  const ArModel truth({1.0, -0.9}, 1.0, 1.0);
  const auto ts = generate_ar(truth, 100000, 1000, 5);
  const auto burg = fit(ts, 1, EstimatorMethod::burg);
  const auto yw = fit(ts, 1, EstimatorMethod::yule_walker);
  EXPECT_NEAR(burg.final_coefficients()[1], -0.9, 0.01);
  EXPECT_NEAR(yw.final_coefficients()[1], -0.9, 0.01);
  EXPECT_NEAR(burg.final_coefficients()[1], yw.final_coefficients()[1], 0.01);
}

TEST(Fit, BurgAndYuleWalkerAgreeOnLongArData) {
  // AR(4) from fixed reflection coefficients.
  std::vector<double> a{1.0};
  for (double c : {0.6, -0.5, 0.4, -0.3}) a = levinson_step(a, 1.0, c).first;
  const ArModel truth(a, 1.0, 1.0);
  const auto ts = generate_ar(truth, 100000, 2000, 99);
  const auto b = fit(ts, 4, EstimatorMethod::burg).final_coefficients();
  const auto y = fit(ts, 4, EstimatorMethod::yule_walker).final_coefficients();
  double scale = 0.0;
  for (std::size_t k = 1; k < a.size(); ++k) scale = std::max(scale, std::abs(a[k]));
  for (std::size_t k = 1; k < a.size(); ++k) EXPECT_NEAR(b[k], y[k], 0.02 * scale);
}

TEST(Fit, ScaleEquivariance) {
  const auto ts = white_noise(500, 4);
  const auto base = fit(ts, 10);
  for (double alpha : {4.0, 0.125}) {  // powers of two scale exactly
    std::vector<double> y = ts.values();
    for (auto& v : y) v *= alpha;
    const auto scaled = fit(TimeSeries(y, 1.0), 10);
    EXPECT_EQ(scaled.c(), base.c());
    EXPECT_EQ(scaled.final_coefficients(), base.final_coefficients());
    for (std::size_t k = 0; k <= 10; ++k) EXPECT_EQ(scaled.p()[k], base.p()[k] * alpha * alpha);
  }
  std::vector<double> y = ts.values();
  for (auto& v : y) v *= 3.7;
  const auto scaled = fit(TimeSeries(y, 1.0), 10);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(scaled.c()[k], base.c()[k], 1e-12);
  for (std::size_t k = 0; k <= 10; ++k)
    EXPECT_NEAR(scaled.p()[k], base.p()[k] * 3.7 * 3.7, 1e-12 * scaled.p()[k]);
}

TEST(Fit, PerfectlyPredictableInputIsDegenerate) {
  // x_t = (-1)^t: an order-1 model predicts it exactly (c = 1, p = 0).
  std::vector<double> x(64);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = t % 2 ? -1.0 : 1.0;
  const TimeSeries ts(x, 1.0);
  const auto one = fit(ts, 1);
  EXPECT_DOUBLE_EQ(std::abs(one.c()[0]), 1.0);
  EXPECT_EQ(one.p()[1], 0.0);
  EXPECT_THROW(fit(ts, 2), DegenerateModelError);
}

TEST(Stability, StepDownMatchesRootFinding) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a{1.0};
    for (int k = 0; k < 1 + trial % 6; ++k) a.push_back(u(rng));
    const bool by_roots = oracle::min_root_modulus(a) > 1.0;
    EXPECT_EQ(is_stable(a), by_roots) << "trial " << trial;
  }
}

TEST(Stability, StepDownInvertsLevinson) {
  std::vector<double> a{1.0};
  const std::vector<double> cs{0.5, -0.7, 0.2, 0.9};
  for (double c : cs) a = levinson_step(a, 1.0, c).first;
  const auto back = reflection_from_coefficients(a);
  for (std::size_t k = 0; k < cs.size(); ++k) EXPECT_NEAR(back[k], cs[k], 1e-13);
}
