#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "parasitech/error.hpp"
#include "parasitech/ols.hpp"
#include "parasitech/series.hpp"

namespace parasitech {

/// Logistic growth K / (1 + exp(a - b t)). The curve passes K/2 at the
/// inflection time a/b.
struct LogisticParams {
  double K = 1.0;  // equilibrium level
  double a = 0.0;  // initial-condition constant
  double b = 1.0;  // rate of growth

  LogisticParams() = default;
  LogisticParams(double k, double a_, double b_) : K(k), a(a_), b(b_) {
    if (!(K > 0.0) || !std::isfinite(K)) fail(ErrorCode::invalid_input, "logistic: K must be positive");
    if (!(b > 0.0) || !std::isfinite(b)) fail(ErrorCode::invalid_input, "logistic: b must be positive");
    if (!std::isfinite(a)) fail(ErrorCode::invalid_input, "logistic: a must be finite");
  }

  /// Parameters from the inflection time instead of the constant a.
  static LogisticParams from_midpoint(double k, double b, double t_mid) {
    return LogisticParams(k, b * t_mid, b);
  }

  double inflection_time() const noexcept { return a / b; }
};

/// Host-parasite power law P = A H^B, together with the time-elimination
/// constant C1 relating the two logistic laws.
struct PowerLaw {
  double A = 1.0;
  double B = 1.0;
  double C1 = 1.0;
};

struct LogisticFitReport {
  LogisticParams params;
  double r2_logit = 0.0;
  bool k_at_bound = false;  // optimum within 1% of the k_max_factor cap
  std::size_t n = 0;
  double k_lower = 0.0;
  double k_upper = 0.0;
};

struct TimedValue {
  double t;
  double value;
};

inline double logistic_value(const LogisticParams& p, double t) {
  return p.K / (1.0 + std::exp(p.a - p.b * t));
}

/// Maps each observation v to log((K - v) / v).
inline std::vector<TimedValue> logit_transform(const TechSeries& series, double K) {
  if (!(K > 0.0) || !std::isfinite(K)) fail(ErrorCode::invalid_k, "logit_transform: K must be positive");
  std::vector<TimedValue> out;
  out.reserve(series.size());
  for (const auto& o : series.observations()) {
    if (!(o.value < K) || K - o.value < 1e-12 * K) {
      fail(ErrorCode::invalid_k, "logit_transform: K must exceed every value (series '" +
                                     series.name() + "', t=" + std::to_string(o.t) + ")");
    }
    out.push_back({o.t, std::log((K - o.value) / o.value)});
  }
  return out;
}

/// Golden-section search for the minimum of a unimodal function on [lo, hi].
template <typename F>
double golden_section_minimize(F&& f, double lo, double hi, double rel_tol = 1e-14,
                               int max_iter = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < max_iter && (hi - lo) > rel_tol * std::fabs(hi); ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

namespace detail {

inline stat::RegressionResult logit_regression(const TechSeries& series, double K) {
  const auto pts = logit_transform(series, K);
  std::vector<double> t;
  std::vector<double> z;
  for (const auto& p : pts) {
    t.push_back(p.t);
    z.push_back(p.value);
  }
  return stat::ols_simple(t, z);
}

inline double sum_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace detail

/// Fits K, a, b by searching K in (max * (1 + 1e-6), max * k_max_factor]
/// for the best straight line in logit space.
inline LogisticFitReport fit_logistic(const TechSeries& series, double k_max_factor = 10.0) {
  if (series.size() < 4) {
    fail(ErrorCode::insufficient_data, "fit_logistic: need at least 4 observations in '" +
                                           series.name() + "'");
  }
  const auto values = series.values();
  bool all_equal = true;
  for (double v : values) all_equal = all_equal && v == values.front();
  if (all_equal) fail(ErrorCode::insufficient_data, "fit_logistic: series '" + series.name() + "' is constant");
  if (!(k_max_factor > 1.0 + 1e-6) || !std::isfinite(k_max_factor)) {
    fail(ErrorCode::invalid_input, "fit_logistic: k_max_factor must exceed 1");
  }

  const double vmax = series.max_value();
  const double lower = vmax * (1.0 + 1e-6);
  const double upper = vmax * k_max_factor;

  // 1 - R^2 computed from residuals directly keeps resolution near the optimum.
  auto loss = [&](double K) {
    const auto reg = detail::logit_regression(series, K);
    const double mean_z = stat::mean(reg.fitted);
    double sst = 0.0;
    for (std::size_t i = 0; i < reg.fitted.size(); ++i) {
      const double z = reg.fitted[i] + reg.residuals[i];
      sst += (z - mean_z) * (z - mean_z);
    }
    const double sse = detail::sum_sq(reg.residuals);
    return sst > 0.0 ? sse / sst : 1.0;
  };

  const double K = golden_section_minimize(loss, lower, upper);
  const auto reg = detail::logit_regression(series, K);
  const double b = -reg.coefficients[1];
  if (!(b > 0.0)) {
    fail(ErrorCode::fit_failure, "fit_logistic: series '" + series.name() +
                                     "' has no increasing logistic trend (b <= 0)");
  }

  LogisticFitReport out;
  out.params = LogisticParams(K, reg.coefficients[0], b);
  out.r2_logit = reg.r2;
  out.n = series.size();
  out.k_lower = lower;
  out.k_upper = upper;
  out.k_at_bound = (upper - K) <= 0.01 * upper;
  return out;
}

/// Eliminates time between two logistic laws. Valid while both curves are
/// far below saturation:
///   B  = b2 / b1
///   C1 = exp(b1 (t2 - t1)),  t_i = a_i / b_i
///   A  = K2 (C1 K1)^(-B)
inline PowerLaw derive_power_law(const LogisticParams& host, const LogisticParams& parasite) {
  PowerLaw out;
  out.B = parasite.b / host.b;
  out.C1 = std::exp(host.b * (parasite.inflection_time() - host.inflection_time()));
  out.A = parasite.K * std::pow(out.C1 * host.K, -out.B);
  return out;
}

inline std::vector<TimedValue> forecast_series(const LogisticFitReport& fit,
                                               std::span<const double> horizon) {
  std::vector<TimedValue> out;
  out.reserve(horizon.size());
  for (double t : horizon) {
    if (!std::isfinite(t)) fail(ErrorCode::invalid_input, "forecast: horizon times must be finite");
    out.push_back({t, logistic_value(fit.params, t)});
  }
  return out;
}

}  // namespace parasitech
