#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "parasitech/error.hpp"

namespace parasitech::stat {

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2); callers use the symmetry relation otherwise.
inline double incomplete_beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  constexpr int max_iter = 10000;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0) || !(x <= 1.0)) {
    fail(ErrorCode::invalid_input, "regularized_incomplete_beta: arguments out of domain");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * detail::incomplete_beta_cf(a, b, x) / a;
  }
  return 1.0 - front * detail::incomplete_beta_cf(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability P(|T| >= |t|) for Student's t with `df`
/// degrees of freedom.
inline double student_t_sf(double t, double df) {
  if (!(df >= 1.0)) {
    fail(ErrorCode::invalid_input, "student_t_sf: df must be >= 1");
  }
  if (std::isnan(t)) {
    fail(ErrorCode::invalid_input, "student_t_sf: t is NaN");
  }
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double t2 = t * t;
  // Keep the beta argument below 1/2 on both sides so neither branch
  // subtracts from a value near 1 in the far tail.
  if (t2 < df) {
    return 1.0 - regularized_incomplete_beta(t2 / (df + t2), 0.5, 0.5 * df);
  }
  return regularized_incomplete_beta(df / (df + t2), 0.5 * df, 0.5);
}

/// Upper tail probability P(F >= f) of the F(df1, df2) distribution.
inline double f_sf(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) {
    fail(ErrorCode::invalid_input, "f_sf: degrees of freedom must be positive");
  }
  if (std::isnan(f) || f < 0.0) {
    fail(ErrorCode::invalid_input, "f_sf: f must be non-negative");
  }
  if (f == 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double denom = df2 + df1 * f;
  if (df1 * f < df2) {
    return 1.0 - regularized_incomplete_beta(df1 * f / denom, 0.5 * df1, 0.5 * df2);
  }
  return regularized_incomplete_beta(df2 / denom, 0.5 * df2, 0.5 * df1);
}

/// Two-sided standard normal tail P(|Z| >= |z|).
inline double normal_two_sided(double z) {
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

/// Quantile q such that P(T <= q) = prob for Student's t, prob in (0, 1).
/// Bisection on the two-sided tail; monotone and bracketed, so it always
/// converges to full double resolution.
inline double student_t_quantile(double prob, double df) {
  if (!(prob > 0.0 && prob < 1.0)) {
    fail(ErrorCode::invalid_input, "student_t_quantile: prob must lie in (0, 1)");
  }
  if (prob == 0.5) return 0.0;
  const double upper_tail = prob > 0.5 ? 1.0 - prob : prob;
  const double target = 2.0 * upper_tail;  // two-sided p at |q|
  double lo = 0.0;
  double hi = 1.0;
  while (student_t_sf(hi, df) > target) {
    hi *= 2.0;
    if (hi > 1e300) break;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_sf(mid, df) > target) lo = mid;
    else hi = mid;
  }
  const double q = 0.5 * (lo + hi);
  return prob > 0.5 ? q : -q;
}

/// Significance stars: *** p < .001, ** p < .01, * p < .05.
inline std::string significance_stars(double p) {
  if (std::isnan(p)) return "";
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace parasitech::stat
