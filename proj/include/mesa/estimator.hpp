#pragma once

// AR model fitting: Burg's lattice recursion and the autocorrelation-driven
// Levinson-Durbin (Yule-Walker) recursion. Both advance the prediction error
// filter with levinson_step and differ only in how the reflection
// coefficient of each stage is obtained.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace mesa {

enum class EstimatorMethod { burg, yule_walker };

inline std::string_view to_string(EstimatorMethod m) {
  return m == EstimatorMethod::burg ? "burg" : "yule_walker";
}

inline EstimatorMethod parse_method(std::string_view s) {
  if (s == "burg") return EstimatorMethod::burg;
  if (s == "yule_walker" || s == "yule-walker") return EstimatorMethod::yule_walker;
  detail::fail("unknown estimator method '", s, "' (expected burg or yule_walker)");
}

/// Biased sample autocorrelation of a single lag: (1/N) sum x_t x_{t+k}.
inline double sample_autocorrelation_lag(std::span<const double> x, std::size_t lag) {
  detail::require(lag < x.size(), "sample_autocorrelation: lag ", lag,
                  " out of range for length ", x.size());
  double acc = 0.0;
  const std::size_t n = x.size();
  for (std::size_t t = 0; t + lag < n; ++t) acc += x[t] * x[t + lag];
  return acc / static_cast<double>(n);
}

/// Biased sample autocorrelation r_0..r_max_lag (1/N normalisation).
inline std::vector<double> sample_autocorrelation(const TimeSeries& ts, std::size_t max_lag) {
  detail::require(max_lag < ts.size(), "sample_autocorrelation: max_lag ", max_lag,
                  " must be < series length ", ts.size());
  std::vector<double> r(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) r[k] = sample_autocorrelation_lag(ts.samples(), k);
  return r;
}

/// Reflection coefficient c = -Delta / p with
/// Delta = sum_{n=0}^{N} a_n r_{N-n+1}, N = order of `a`.
inline double reflection_yule_walker(std::span<const double> a, std::span<const double> r,
                                     double p) {
  detail::require(!a.empty() && a[0] == 1.0, "reflection_yule_walker: a[0] must be 1");
  const std::size_t order = a.size() - 1;
  detail::require(r.size() >= order + 2, "reflection_yule_walker: need ", order + 2,
                  " autocorrelation lags, got ", r.size());
  if (!(p > 0.0))
    throw DegenerateModelError("reflection_yule_walker: prediction-error power is zero");
  double delta = 0.0;
  for (std::size_t n = 0; n <= order; ++n) delta += a[n] * r[order - n + 1];
  return -delta / p;
}

/// Burg reflection coefficient from aligned forward/backward errors:
/// c = -2 sum f_t b_t / sum (f_t^2 + b_t^2). `bwd` must already be shifted so
/// that bwd[i] pairs with fwd[i].
inline double reflection_burg(std::span<const double> fwd, std::span<const double> bwd) {
  detail::require(fwd.size() == bwd.size(), "reflection_burg: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    num += fwd[i] * bwd[i];
    den += fwd[i] * fwd[i] + bwd[i] * bwd[i];
  }
  if (!(den > 0.0)) throw DegenerateModelError("reflection_burg: zero error energy");
  double c = -2.0 * num / den;
  // Cauchy-Schwarz bounds |c| by 1; rounding can overshoot by an ulp.
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

/// Stateful order-by-order recursion. Each `step()` raises the model order by
/// one, so callers can stop as soon as they have what they need.
class ArRecursion {
 public:
  ArRecursion(const TimeSeries& ts, EstimatorMethod method)
      : method_(method), x_(ts.values()), a_{1.0} {
    p_ = sample_autocorrelation_lag(x_, 0);
    if (!(p_ > 0.0)) throw DegenerateModelError("fit: input has zero power");
    if (method_ == EstimatorMethod::burg) {
      fwd_ = x_;
      bwd_ = x_;
    } else {
      r_.push_back(p_);
    }
  }

  EstimatorMethod method() const { return method_; }
  std::size_t order() const { return a_.size() - 1; }
  double power() const { return p_; }
  const std::vector<double>& coefficients() const { return a_; }
  /// Highest order the data supports.
  std::size_t limit() const { return x_.size() - 1; }

  /// Advance one order and return the reflection coefficient used.
  double step() {
    const std::size_t k = order();
    detail::require(k < limit(), "fit: cannot exceed order ", limit());
    if (!(p_ > 0.0))
      throw DegenerateModelError("fit: prediction-error power reached zero at order " +
                                 std::to_string(k));
    const double c = method_ == EstimatorMethod::burg ? burg_reflection(k) : yw_reflection();
    auto [a, p] = levinson_step(a_, p_, c);
    a_ = std::move(a);
    p_ = p;
    return c;
  }

 private:
  double burg_reflection(std::size_t k) {
    // Usable pairs at order k: fwd[t], bwd[t-1] for t = k+1 .. N-1.
    const std::size_t n = x_.size();
    const std::size_t len = n - k - 1;
    const double c = reflection_burg(std::span(fwd_).subspan(k + 1, len),
                                     std::span(bwd_).subspan(k, len));
    // Descending t keeps bwd[t-1] at its previous-order value while it is read.
    for (std::size_t t = n - 1; t > k; --t) {
      const double f = fwd_[t];
      fwd_[t] = f + c * bwd_[t - 1];
      bwd_[t] = bwd_[t - 1] + c * f;
    }
    return c;
  }

  double yw_reflection() {
    while (r_.size() < order() + 2) r_.push_back(sample_autocorrelation_lag(x_, r_.size()));
    double c = reflection_yule_walker(a_, r_, p_);
    // A biased autocorrelation is positive semidefinite; clip rounding excess.
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return c;
  }

  EstimatorMethod method_;
  std::vector<double> x_;
  std::vector<double> a_;
  double p_;
  std::vector<double> fwd_, bwd_;
  std::vector<double> r_;
};

enum class Retention { all_orders, final_only };

/// Run the recursion from order 0 up to `max_order`.
inline RecursionTrace fit(const TimeSeries& ts, std::size_t max_order,
                          EstimatorMethod method = EstimatorMethod::burg,
                          Retention retention = Retention::all_orders) {
  detail::require(max_order >= 1 && max_order <= ts.size() - 1, "fit: max_order ",
                  max_order, " must lie in [1, ", ts.size() - 1, "]");
  ArRecursion rec(ts, method);
  std::vector<double> p{rec.power()};
  std::vector<double> c;
  std::vector<std::vector<double>> coeffs;
  p.reserve(max_order + 1);
  c.reserve(max_order);
  const bool keep_all = retention == Retention::all_orders;
  if (keep_all) coeffs.push_back(rec.coefficients());
  for (std::size_t k = 0; k < max_order; ++k) {
    c.push_back(rec.step());
    p.push_back(rec.power());
    if (keep_all) coeffs.push_back(rec.coefficients());
  }
  if (!keep_all) coeffs.push_back(rec.coefficients());
  return RecursionTrace(std::move(p), std::move(c), std::move(coeffs), keep_all);
}

/// Reflection coefficients of a prediction error filter (step-down
/// recursion). Throws if a stage has |c| >= 1, i.e. the filter has a root on
/// or inside the unit circle.
inline std::vector<double> reflection_from_coefficients(std::span<const double> a_in) {
  detail::require(!a_in.empty() && a_in[0] == 1.0,
                  "reflection_from_coefficients: a[0] must be 1");
  std::vector<double> a(a_in.begin(), a_in.end());
  std::vector<double> c(a.size() - 1);
  for (std::size_t m = a.size() - 1; m >= 1; --m) {
    const double k = a[m];
    c[m - 1] = k;
    if (!(std::abs(k) < 1.0))
      throw NumericalError("reflection_from_coefficients: unstable stage at order " +
                           std::to_string(m));
    const double den = 1.0 - k * k;
    std::vector<double> prev(m);
    prev[0] = 1.0;
    for (std::size_t s = 1; s < m; ++s) prev[s] = (a[s] - k * a[m - s]) / den;
    a = std::move(prev);
  }
  return c;
}

namespace detail {

// Spectral radius of the companion matrix of z^m + a_1 z^(m-1) + ... + a_m,
// whose roots are the reciprocals of the roots of sum a_s z^s.
inline double companion_radius(std::span<const double> a) {
  const auto m = static_cast<Eigen::Index>(a.size() - 1);
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) comp(0, j) = -a[static_cast<std::size_t>(j + 1)];
  for (Eigen::Index i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
  if (solver.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace detail

/// True when every root of sum a_s z^s lies strictly outside the unit circle.
/// A positive `margin` also rejects stages with |c| > 1 - margin, i.e. roots
/// that sit on the circle up to rounding.
///
/// The step-down recursion divides by 1 - c^2 at every stage, so rounding
/// grows quickly for long filters with several sharp resonances and the
/// recursion can break down on a perfectly stable model. When that happens
/// the roots are located from the companion matrix instead.
inline bool is_stable(std::span<const double> a, double margin = 0.0) {
  try {
    for (double c : reflection_from_coefficients(a))
      if (std::abs(c) > 1.0 - margin) return false;
    return true;
  } catch (const NumericalError&) {
    if (a.empty() || a[0] != 1.0) return false;
    for (double v : a)
      if (!std::isfinite(v)) return false;
    return detail::companion_radius(a) < 1.0 - margin;
  }
}

}  // namespace mesa
