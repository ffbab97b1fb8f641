#pragma once

// Order selection: FPE, CAT and OBD losses, the M_max bound and an
// incremental scanner with early stopping.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "core.hpp"
#include "estimator.hpp"

namespace mesa {

/// Upper bound on the AR order for n samples: floor(2n / ln 2n), at most n - 1.
inline std::size_t max_order(std::size_t n) {
  detail::require(n >= 2, "max_order: need n >= 2, got ", n);
  const double two_n = 2.0 * static_cast<double>(n);
  const auto raw = static_cast<std::size_t>(std::floor(two_n / std::log(two_n)));
  return std::min(raw, n - 1);
}

/// Akaike's final prediction error: p_m (n + m + 1) / (n - m - 1).
inline double loss_fpe(double p_m, std::size_t n, std::size_t m) {
  if (m + 2 > n)
    throw UndefinedLossError("loss_fpe: order " + std::to_string(m) +
                             " needs n >= m + 2");
  const double N = static_cast<double>(n), M = static_cast<double>(m);
  return p_m * (N + M + 1.0) / (N - M - 1.0);
}

/// Parzen's CAT:
///   (1/n) sum_{k=1}^{m} (n - k) / (n p_k) - (n - m) / (n p_m).
/// `p` is indexed by order and must reach at least order m.
inline double loss_cat(std::span<const double> p, std::size_t n, std::size_t m) {
  if (m == 0) throw UndefinedLossError("loss_cat: undefined at order 0");
  detail::require(p.size() > m, "loss_cat: need p up to order ", m);
  const double N = static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (!(p[k] > 0.0)) throw UndefinedLossError("loss_cat: p_k must be > 0");
    sum += (N - static_cast<double>(k)) / (N * p[k]);
  }
  return sum / N - (N - static_cast<double>(m)) / (N * p[m]);
}

/// Rao's optimum Bayes decision rule (natural logarithms):
///   (n - m - 2) ln p_m + m ln n + sum_{k<m} ln p_k + sum_{k=1}^{m} a_k^2.
/// `p` is indexed by order; `a` is the order-m filter including a_0 = 1.
inline double loss_obd(std::span<const double> p, std::span<const double> a, std::size_t n,
                       std::size_t m) {
  detail::require(p.size() > m, "loss_obd: need p up to order ", m);
  detail::require(a.size() == m + 1, "loss_obd: coefficient vector must have order ", m);
  double log_sum = 0.0;
  for (std::size_t k = 0; k <= m; ++k)
    if (!(p[k] > 0.0)) throw UndefinedLossError("loss_obd: p_k must be > 0");
  for (std::size_t k = 0; k < m; ++k) log_sum += std::log(p[k]);
  double a2 = 0.0;
  for (std::size_t k = 1; k <= m; ++k) a2 += a[k] * a[k];
  const double N = static_cast<double>(n), M = static_cast<double>(m);
  return (N - M - 2.0) * std::log(p[m]) + M * std::log(N) + log_sum + a2;
}

struct EarlyStopConfig {
  bool enabled = true;
  std::size_t patience = 100;
  std::size_t check_stride = 1;

  void validate() const {
    detail::require(patience >= 1, "EarlyStopConfig: patience must be >= 1");
    detail::require(check_stride >= 1, "EarlyStopConfig: check_stride must be >= 1");
  }

  /// Default for a scan bounded by m_max: patience max(100, ceil(m_max / 10)).
  static EarlyStopConfig defaults_for(std::size_t m_max) {
    return {true, std::max<std::size_t>(100, (m_max + 9) / 10), 1};
  }

  static EarlyStopConfig disabled() { return {false, 1, 1}; }
};

/// Consumes (order, p_m, a_m) one order at a time and tracks the first
/// minimum of the chosen loss. Running sums make each push O(m) at worst
/// (OBD's coefficient energy) and O(1) otherwise.
class OrderScanner {
 public:
  OrderScanner(Criterion criterion, std::size_t n, EarlyStopConfig es)
      : criterion_(criterion), n_(n), es_(es) {
    es_.validate();
    detail::require(n >= 2, "OrderScanner: need n >= 2");
  }

  /// Feed order m (orders must arrive as 0, 1, 2, ...). Returns false once
  /// the early-stop rule fires.
  bool push(std::size_t m, double p_m, std::span<const double> a) {
    detail::require(m == losses_.size(), "OrderScanner: orders must be consecutive");
    const double N = static_cast<double>(n_);
    double loss = std::numeric_limits<double>::quiet_NaN();
    switch (criterion_) {
      case Criterion::fpe:
        if (m + 2 <= n_) loss = loss_fpe(p_m, n_, m);
        break;
      case Criterion::cat:
        if (m >= 1) {
          if (!(p_m > 0.0)) throw UndefinedLossError("CAT: p_k must be > 0");
          cat_sum_ += (N - static_cast<double>(m)) / (N * p_m);
          loss = cat_sum_ / N - (N - static_cast<double>(m)) / (N * p_m);
        }
        break;
      case Criterion::obd: {
        if (!(p_m > 0.0)) throw UndefinedLossError("OBD: p_k must be > 0");
        double a2 = 0.0;
        for (std::size_t k = 1; k < a.size(); ++k) a2 += a[k] * a[k];
        const double M = static_cast<double>(m);
        loss = (N - M - 2.0) * std::log(p_m) + M * std::log(N) + obd_log_sum_ + a2;
        obd_log_sum_ += std::log(p_m);
        break;
      }
    }
    losses_.push_back(loss);
    if (!std::isnan(loss) && (!best_ || loss < losses_[*best_])) best_ = m;
    ++evaluated_;
    if (es_.enabled && best_ && evaluated_ % es_.check_stride == 0 &&
        m - *best_ >= es_.patience) {
      stopped_ = true;
      return false;
    }
    return true;
  }

  bool stopped() const { return stopped_; }
  std::optional<std::size_t> best() const { return best_; }

  OrderSelection result() const {
    if (!best_)
      throw UndefinedLossError(std::string("select_order: ") +
                               std::string(to_string(criterion_)) +
                               " is undefined at every evaluated order");
    return OrderSelection(criterion_, losses_, *best_, stopped_);
  }

 private:
  Criterion criterion_;
  std::size_t n_;
  EarlyStopConfig es_;
  std::vector<double> losses_;
  std::optional<std::size_t> best_;
  std::size_t evaluated_ = 0;
  bool stopped_ = false;
  double cat_sum_ = 0.0;
  double obd_log_sum_ = 0.0;
};

/// Pick the order minimising `criterion` over a precomputed trace. `n` is the
/// length of the series the trace was fitted to.
inline OrderSelection select_order(const RecursionTrace& trace, std::size_t n,
                                   Criterion criterion, EarlyStopConfig es) {
  detail::require(trace.max_order() >= 1, "select_order: trace must reach order >= 1");
  OrderScanner scanner(criterion, n, es);
  const auto& p = trace.p();
  const auto& c = trace.c();
  std::vector<double> a{1.0};
  for (std::size_t m = 0; m <= trace.max_order(); ++m) {
    if (m > 0) {
      if (trace.all_orders_retained())
        a = trace.stored_coefficients()[m];
      else if (criterion == Criterion::obd)
        a = levinson_step(a, p[m - 1], c[m - 1]).first;
    }
    if (!scanner.push(m, p[m], a)) break;
  }
  return scanner.result();
}

/// Result of fitting and selecting in one pass.
struct Estimate {
  ArModel model;
  OrderSelection selection;
  std::size_t max_order;  // bound that was scanned to
};

/// Fit with the recursion and stop as soon as the early-stop rule fires, so
/// orders beyond the stopping point are never computed.
inline Estimate estimate(const TimeSeries& ts, Criterion criterion,
                         EstimatorMethod method = EstimatorMethod::burg,
                         std::optional<std::size_t> order_bound = std::nullopt,
                         std::optional<EarlyStopConfig> early_stop = std::nullopt) {
  const std::size_t bound = order_bound.value_or(max_order(ts.size()));
  detail::require(bound >= 1 && bound <= ts.size() - 1, "estimate: max order ", bound,
                  " must lie in [1, ", ts.size() - 1, "]");
  const EarlyStopConfig es = early_stop.value_or(EarlyStopConfig::defaults_for(bound));
  ArRecursion rec(ts, method);
  OrderScanner scanner(criterion, ts.size(), es);
  std::vector<double> best_a{1.0};
  double best_p = rec.power();
  scanner.push(0, rec.power(), rec.coefficients());
  for (std::size_t m = 1; m <= bound; ++m) {
    const auto before = scanner.best();
    rec.step();
    const bool go_on = scanner.push(m, rec.power(), rec.coefficients());
    if (scanner.best() != before) {
      best_a = rec.coefficients();
      best_p = rec.power();
    }
    if (!go_on) break;
  }
  OrderSelection sel = scanner.result();
  return Estimate{ArModel(std::move(best_a), best_p, ts.dt()), std::move(sel), bound};
}

}  // namespace mesa
