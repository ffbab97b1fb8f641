#pragma once

// Domain types shared by every part of the library.
//
// Sign convention: an ArModel stores the prediction error filter
// (1, a_1, ..., a_m). The equivalent autoregressive recursion is
//     x_t = b_1 x_{t-1} + ... + b_m x_{t-m} + e_t,   b_i = -a_i,
// with Var(e_t) = p_m. Power spectral densities carry units of signal^2/Hz
// and are two-sided unless stated otherwise.

#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mesa {

/// Raised when a value violates a documented precondition or invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures that come from the numbers rather than from the caller.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero prediction-error power or a zero Burg denominator: the input is
/// perfectly predictable and no further order can be fitted.
class DegenerateModelError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An order-selection loss evaluated outside its domain.
class UndefinedLossError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Quadrature grid too coarse for the requested accuracy.
class AccuracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Random model generation gave up after its rejection budget.
class GenerationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

namespace detail {

template <typename... Parts>
[[noreturn]] void fail(Parts&&... parts) {
  std::ostringstream os;
  (os << ... << std::forward<Parts>(parts));
  throw ValidationError(os.str());
}

template <typename... Parts>
void require(bool ok, Parts&&... parts) {
  if (!ok) fail(std::forward<Parts>(parts)...);
}

inline bool all_finite(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace detail

/// Uniformly sampled real signal.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double dt)
      : samples_(std::move(samples)), dt_(dt) {
    detail::require(samples_.size() >= 2, "TimeSeries: length must be >= 2, got ",
                    samples_.size());
    detail::require(std::isfinite(dt_) && dt_ > 0.0,
                    "TimeSeries: dt must be finite and > 0, got ", dt_);
    detail::require(detail::all_finite(samples_),
                    "TimeSeries: samples must all be finite");
  }

  std::span<const double> samples() const { return samples_; }
  const std::vector<double>& values() const { return samples_; }
  double dt() const { return dt_; }
  std::size_t size() const { return samples_.size(); }
  double nyquist() const { return 0.5 / dt_; }

  bool operator==(const TimeSeries&) const = default;

 private:
  std::vector<double> samples_;
  double dt_;
};

/// Prediction error filter plus its innovation power.
class ArModel {
 public:
  ArModel(std::vector<double> a, double p_m, double dt)
      : a_(std::move(a)), p_m_(p_m), dt_(dt) {
    detail::require(!a_.empty() && a_[0] == 1.0, "ArModel: a[0] must be exactly 1");
    detail::require(detail::all_finite(a_), "ArModel: coefficients must be finite");
    detail::require(std::isfinite(p_m_) && p_m_ >= 0.0,
                    "ArModel: p_m must be finite and >= 0, got ", p_m_);
    detail::require(std::isfinite(dt_) && dt_ > 0.0,
                    "ArModel: dt must be finite and > 0, got ", dt_);
  }

  /// Prediction error filter (1, a_1, ..., a_m).
  const std::vector<double>& a() const { return a_; }
  double p_m() const { return p_m_; }
  double dt() const { return dt_; }
  std::size_t order() const { return a_.size() - 1; }

  /// Regression coefficients b_1..b_m of the equivalent AR process.
  std::vector<double> ar_coefficients() const {
    std::vector<double> b(order());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = -a_[i + 1];
    return b;
  }

  bool operator==(const ArModel&) const = default;

 private:
  std::vector<double> a_;
  double p_m_;
  double dt_;
};

/// Per-order output of a Levinson-type recursion.
///
/// `p[k]` is the prediction-error power at order k, `c[k]` the reflection
/// coefficient that takes order k to k + 1. Coefficient vectors for every
/// order are kept only when `all_orders_retained()`; the final vector is
/// always available and any other order is rebuilt from `c` on request.
class RecursionTrace {
 public:
  RecursionTrace(std::vector<double> p, std::vector<double> c,
                 std::vector<std::vector<double>> coeffs, bool all_orders_retained)
      : p_(std::move(p)), c_(std::move(c)), coeffs_(std::move(coeffs)),
        all_orders_(all_orders_retained) {
    detail::require(!p_.empty(), "RecursionTrace: needs at least order 0");
    detail::require(c_.size() + 1 == p_.size(),
                    "RecursionTrace: expected ", p_.size() - 1,
                    " reflection coefficients, got ", c_.size());
    detail::require(detail::all_finite(p_) && detail::all_finite(c_),
                    "RecursionTrace: values must be finite");
    detail::require(p_[0] >= 0.0, "RecursionTrace: p[0] must be >= 0");
    for (std::size_t k = 0; k < c_.size(); ++k) {
      detail::require(std::abs(c_[k]) <= 1.0, "RecursionTrace: |c[", k, "]| = ",
                      std::abs(c_[k]), " exceeds 1");
      detail::require(p_[k + 1] <= p_[k] && p_[k + 1] >= 0.0,
                      "RecursionTrace: p must be non-increasing and >= 0 (order ", k + 1,
                      ")");
    }
    const std::size_t expected = all_orders_ ? p_.size() : 1;
    detail::require(coeffs_.size() == expected, "RecursionTrace: expected ", expected,
                    " coefficient vectors, got ", coeffs_.size());
    for (const auto& v : coeffs_)
      detail::require(!v.empty() && v[0] == 1.0,
                      "RecursionTrace: coefficient vectors must start with 1");
    detail::require(coeffs_.back().size() == p_.size(),
                    "RecursionTrace: final coefficient vector has wrong length");
  }

  std::size_t max_order() const { return c_.size(); }
  const std::vector<double>& p() const { return p_; }
  const std::vector<double>& c() const { return c_; }
  bool all_orders_retained() const { return all_orders_; }
  const std::vector<std::vector<double>>& stored_coefficients() const { return coeffs_; }

  const std::vector<double>& final_coefficients() const { return coeffs_.back(); }

  /// Coefficient vector of the given order (copy; replays `c` when needed).
  std::vector<double> coefficients(std::size_t order) const;

  /// Model of the given order at sampling interval `dt`.
  ArModel model(std::size_t order, double dt) const {
    return ArModel(coefficients(order), p_.at(order), dt);
  }

  bool operator==(const RecursionTrace&) const = default;

 private:
  std::vector<double> p_;
  std::vector<double> c_;
  std::vector<std::vector<double>> coeffs_;
  bool all_orders_;
};

enum class Sided { two_sided, one_sided };

inline std::string_view to_string(Sided s) {
  return s == Sided::two_sided ? "two_sided" : "one_sided";
}

inline Sided parse_sided(std::string_view s) {
  if (s == "two_sided") return Sided::two_sided;
  if (s == "one_sided") return Sided::one_sided;
  detail::fail("unknown sidedness '", s, "'");
}

/// Power spectral density tabulated on a frequency grid.
class SpectralDensity {
 public:
  SpectralDensity(std::vector<double> freqs, std::vector<double> values, Sided sided,
                  double dt)
      : freqs_(std::move(freqs)), values_(std::move(values)), sided_(sided), dt_(dt) {
    detail::require(std::isfinite(dt_) && dt_ > 0.0, "SpectralDensity: dt must be > 0");
    detail::require(!freqs_.empty() && freqs_.size() == values_.size(),
                    "SpectralDensity: freqs and values must be non-empty and equal length");
    detail::require(detail::all_finite(freqs_) && detail::all_finite(values_),
                    "SpectralDensity: values must be finite");
    const double ny = nyquist();
    const double slack = 1e-9 * ny;
    const double lo = sided_ == Sided::two_sided ? -ny : 0.0;
    for (std::size_t i = 0; i < freqs_.size(); ++i) {
      if (i > 0)
        detail::require(freqs_[i] > freqs_[i - 1],
                        "SpectralDensity: freqs must be strictly increasing");
      detail::require(freqs_[i] >= lo - slack && freqs_[i] <= ny + slack,
                      "SpectralDensity: frequency ", freqs_[i], " outside [", lo, ", ",
                      ny, "]");
      detail::require(values_[i] >= 0.0, "SpectralDensity: negative value at f = ",
                      freqs_[i]);
    }
  }

  const std::vector<double>& freqs() const { return freqs_; }
  const std::vector<double>& values() const { return values_; }
  Sided sided() const { return sided_; }
  double dt() const { return dt_; }
  double nyquist() const { return 0.5 / dt_; }
  std::size_t size() const { return freqs_.size(); }

  /// Non-negative frequencies with values strictly inside (0, Ny) doubled.
  SpectralDensity to_one_sided() const {
    if (sided_ == Sided::one_sided) return *this;
    std::vector<double> f, v;
    const double ny = nyquist();
    const double tol = 1e-12 * ny;
    for (std::size_t i = 0; i < freqs_.size(); ++i) {
      if (freqs_[i] < -tol) continue;
      const bool interior = freqs_[i] > tol && freqs_[i] < ny - tol;
      f.push_back(std::max(freqs_[i], 0.0));
      v.push_back(interior ? 2.0 * values_[i] : values_[i]);
    }
    return SpectralDensity(std::move(f), std::move(v), Sided::one_sided, dt_);
  }

  /// Inverse of to_one_sided on the non-negative half (no mirroring).
  SpectralDensity halve_interior() const {
    if (sided_ == Sided::two_sided) return *this;
    std::vector<double> v = values_;
    const double ny = nyquist();
    const double tol = 1e-12 * ny;
    for (std::size_t i = 0; i < freqs_.size(); ++i)
      if (freqs_[i] > tol && freqs_[i] < ny - tol) v[i] *= 0.5;
    return SpectralDensity(freqs_, std::move(v), Sided::two_sided, dt_);
  }

  bool operator==(const SpectralDensity&) const = default;

 private:
  std::vector<double> freqs_;
  std::vector<double> values_;
  Sided sided_;
  double dt_;
};

enum class Criterion { fpe, cat, obd };

inline std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::fpe: return "fpe";
    case Criterion::cat: return "cat";
    case Criterion::obd: return "obd";
  }
  return "?";
}

inline Criterion parse_criterion(std::string_view s) {
  if (s == "fpe" || s == "FPE") return Criterion::fpe;
  if (s == "cat" || s == "CAT") return Criterion::cat;
  if (s == "obd" || s == "OBD") return Criterion::obd;
  detail::fail("unknown criterion '", s, "' (expected fpe, cat or obd)");
}

/// Loss per scanned order and the order that minimises it.
///
/// `losses[m]` is the loss at order m; orders where the loss is undefined
/// (order 0 for CAT) hold NaN.
class OrderSelection {
 public:
  OrderSelection(Criterion criterion, std::vector<double> losses,
                 std::size_t chosen_order, bool early_stopped)
      : criterion_(criterion), losses_(std::move(losses)), chosen_(chosen_order),
        early_stopped_(early_stopped) {
    detail::require(chosen_ < losses_.size(), "OrderSelection: chosen order ", chosen_,
                    " not among evaluated orders");
    detail::require(std::isfinite(losses_[chosen_]),
                    "OrderSelection: loss at chosen order is undefined");
    for (std::size_t m = 0; m < losses_.size(); ++m) {
      if (std::isnan(losses_[m])) continue;
      detail::require(m < chosen_ ? losses_[m] > losses_[chosen_]
                                  : losses_[m] >= losses_[chosen_],
                      "OrderSelection: chosen order is not the first minimum");
    }
  }

  Criterion criterion() const { return criterion_; }
  const std::vector<double>& losses() const { return losses_; }
  std::size_t chosen_order() const { return chosen_; }
  bool early_stopped() const { return early_stopped_; }

  bool operator==(const OrderSelection& o) const {
    if (criterion_ != o.criterion_ || chosen_ != o.chosen_ ||
        early_stopped_ != o.early_stopped_ || losses_.size() != o.losses_.size())
      return false;
    for (std::size_t i = 0; i < losses_.size(); ++i) {
      const bool na = std::isnan(losses_[i]), nb = std::isnan(o.losses_[i]);
      if (na != nb || (!na && losses_[i] != o.losses_[i])) return false;
    }
    return true;
  }

 private:
  Criterion criterion_;
  std::vector<double> losses_;
  std::size_t chosen_;
  bool early_stopped_;
};

/// Independent sampled continuations of a conditioning series.
class ForecastEnsemble {
 public:
  ForecastEnsemble(std::vector<std::vector<double>> realizations, std::size_t seed_length,
                   ArModel model)
      : realizations_(std::move(realizations)), seed_length_(seed_length),
        model_(std::move(model)) {
    detail::require(!realizations_.empty(), "ForecastEnsemble: no realizations");
    const std::size_t h = realizations_.front().size();
    detail::require(h >= 1, "ForecastEnsemble: horizon must be >= 1");
    for (const auto& r : realizations_)
      detail::require(r.size() == h, "ForecastEnsemble: ragged realizations");
  }

  const std::vector<std::vector<double>>& realizations() const { return realizations_; }
  std::size_t horizon() const { return realizations_.front().size(); }
  std::size_t size() const { return realizations_.size(); }
  std::size_t seed_length() const { return seed_length_; }
  const ArModel& model() const { return model_; }

  bool operator==(const ForecastEnsemble&) const = default;

 private:
  std::vector<std::vector<double>> realizations_;
  std::size_t seed_length_;
  ArModel model_;
};

// Order N-1 -> N update of the prediction error filter:
//   a = (prev, 0) + c * (0, reverse(prev)),   p = prev_p * (1 - c^2).
inline std::pair<std::vector<double>, double> levinson_step(std::span<const double> prev_a,
                                                            double prev_p, double c) {
  detail::require(!prev_a.empty() && prev_a[0] == 1.0, "levinson_step: prev_a[0] must be 1");
  detail::require(prev_p >= 0.0, "levinson_step: prev_p must be >= 0");
  detail::require(std::abs(c) <= 1.0, "levinson_step: |c| must be <= 1, got ", c);
  const std::size_t n = prev_a.size();
  std::vector<double> a(n + 1);
  a[0] = 1.0;
  for (std::size_t s = 1; s < n; ++s) a[s] = prev_a[s] + c * prev_a[n - s];
  a[n] = c;
  return {std::move(a), prev_p * (1.0 - c * c)};
}

inline std::vector<double> RecursionTrace::coefficients(std::size_t order) const {
  detail::require(order <= max_order(), "RecursionTrace: order ", order,
                  " exceeds max order ", max_order());
  if (order == max_order()) return coeffs_.back();
  if (all_orders_) return coeffs_[order];
  std::vector<double> a{1.0};
  for (std::size_t k = 0; k < order; ++k) a = levinson_step(a, p_[k], c_[k]).first;
  return a;
}

}  // namespace mesa
