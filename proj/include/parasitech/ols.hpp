#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parasitech/distributions.hpp"
#include "parasitech/error.hpp"
#include "parasitech/stats.hpp"

namespace parasitech::stat {

/// Ordinary least squares estimates with the usual diagnostics. Index 0 of
/// every per-coefficient sequence is the intercept.
struct RegressionResult {
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  std::vector<std::optional<double>> standardized_coefficients;  // [0] always empty
  double r2 = 0.0;
  double r2_adj = 0.0;
  double f_stat = 0.0;
  double f_p = 1.0;
  double residual_se = 0.0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<double> residuals;
  std::vector<double> fitted;
  // Residual variance is zero to rounding. p-values are then reported as 0
  // instead of dividing by a vanishing standard error.
  bool perfect_fit = false;

  std::size_t df_residual() const noexcept { return n - k - 1; }
};

namespace detail {

// Relative size below which a Householder pivot marks the column as a linear
// combination of the preceding ones.
inline constexpr double rank_tolerance = 1e-10;

// Least squares through Householder QR of [1 | columns]. `names` label the
// predictor columns in collinearity errors.
inline RegressionResult ols_qr(std::span<const std::vector<double>> columns,
                               std::span<const double> y,
                               std::span<const std::string> names) {
  const std::size_t n = y.size();
  const std::size_t k = columns.size();
  const std::size_t p = k + 1;

  std::vector<double> a(n * p);  // column-major
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[j * n + i]; };
  for (std::size_t i = 0; i < n; ++i) at(i, 0) = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) at(i, j + 1) = columns[j][i];
  }
  std::vector<double> col_norm(p);
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += at(i, j) * at(i, j);
    col_norm[j] = std::sqrt(s);
  }

  std::vector<double> qty(y.begin(), y.end());
  std::vector<double> v(n);
  for (std::size_t j = 0; j < p; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < n; ++i) norm += at(i, j) * at(i, j);
    norm = std::sqrt(norm);
    const double alpha = at(j, j) > 0.0 ? -norm : norm;

    if (!(std::fabs(alpha) > rank_tolerance * col_norm[j])) {
      if (j == 0) fail(ErrorCode::singular_design, "ols: intercept column is degenerate");
      const std::string label =
          j - 1 < names.size() ? names[j - 1] : "column " + std::to_string(j);
      fail(ErrorCode::collinearity,
           "ols: predictor '" + label + "' is collinear with the intercept or earlier predictors");
    }

    double vnorm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) {
      v[i] = at(i, j);
      if (i == j) v[i] -= alpha;
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 > 0.0) {
      auto reflect = [&](auto&& elem) {
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += v[i] * elem(i);
        const double scale = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < n; ++i) elem(i) -= scale * v[i];
      };
      for (std::size_t c = j; c < p; ++c) {
        reflect([&](std::size_t i) -> double& { return at(i, c); });
      }
      reflect([&](std::size_t i) -> double& { return qty[i]; });
    }
    at(j, j) = alpha;
    for (std::size_t i = j + 1; i < n; ++i) at(i, j) = 0.0;
  }

  // Back substitution R beta = Q^T y.
  std::vector<double> beta(p);
  for (std::size_t jj = p; jj-- > 0;) {
    double s = qty[jj];
    for (std::size_t c = jj + 1; c < p; ++c) s -= at(jj, c) * beta[c];
    beta[jj] = s / at(jj, jj);
  }

  // R^{-1}, upper triangular; (X^T X)^{-1} = R^{-1} R^{-T}.
  std::vector<double> rinv(p * p, 0.0);
  auto ri = [&](std::size_t i, std::size_t j) -> double& { return rinv[i * p + j]; };
  for (std::size_t j = 0; j < p; ++j) {
    ri(j, j) = 1.0 / at(j, j);
    for (std::size_t i = j; i-- > 0;) {
      double s = 0.0;
      for (std::size_t m = i + 1; m <= j; ++m) s += at(i, m) * ri(m, j);
      ri(i, j) = -s / at(i, i);
    }
  }

  RegressionResult out;
  out.n = n;
  out.k = k;
  out.coefficients = beta;
  out.fitted.resize(n);
  out.residuals.resize(n);
  double sse = 0.0;
  double sum_y2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = beta[0];
    for (std::size_t j = 0; j < k; ++j) f += beta[j + 1] * columns[j][i];
    out.fitted[i] = f;
    out.residuals[i] = y[i] - f;
    sse += out.residuals[i] * out.residuals[i];
    sum_y2 += y[i] * y[i];
  }
  const double y_mean = mean(y);
  double sst = 0.0;
  for (double yi : y) sst += (yi - y_mean) * (yi - y_mean);

  const double df = static_cast<double>(n - p);
  const double sigma2 = sse / df;
  out.residual_se = std::sqrt(sigma2);
  out.perfect_fit = sse <= 1e-24 * sum_y2;
  const bool no_variance = sst == 0.0;

  out.standard_errors.resize(p);
  out.t_stats.resize(p);
  out.p_values.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = 0.0;
    for (std::size_t m = j; m < p; ++m) d += ri(j, m) * ri(j, m);
    const double se = std::sqrt(sigma2 * d);
    out.standard_errors[j] = se;
    if (no_variance && j > 0) {
      out.t_stats[j] = 0.0;
      out.p_values[j] = 1.0;
      continue;
    }
    if (se > 0.0) {
      out.t_stats[j] = beta[j] / se;
    } else {
      out.t_stats[j] = beta[j] == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), beta[j]);
    }
    out.p_values[j] = out.perfect_fit ? 0.0 : student_t_sf(out.t_stats[j], df);
  }

  if (no_variance) {
    out.r2 = 0.0;
    out.f_stat = 0.0;
    out.f_p = 1.0;
  } else {
    out.r2 = std::clamp(1.0 - sse / sst, 0.0, 1.0);
    if (out.perfect_fit || sse == 0.0) {
      out.f_stat = std::numeric_limits<double>::infinity();
      out.f_p = 0.0;
    } else {
      out.f_stat = ((sst - sse) / static_cast<double>(k)) / sigma2;
      out.f_p = f_sf(std::max(out.f_stat, 0.0), static_cast<double>(k), df);
    }
  }
  out.r2_adj = 1.0 - (1.0 - out.r2) * static_cast<double>(n - 1) / df;

  out.standardized_coefficients.assign(p, std::nullopt);
  const double sd_y = sample_sd(y);
  if (sd_y > 0.0) {
    for (std::size_t j = 0; j < k; ++j) {
      out.standardized_coefficients[j + 1] = beta[j + 1] * sample_sd(columns[j]) / sd_y;
    }
  }
  return out;
}

inline void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) fail(ErrorCode::invalid_input, std::string(what) + ": non-finite value");
  }
}

}  // namespace detail

/// Simple regression y = b0 + b1 x.
inline RegressionResult ols_simple(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::invalid_input, "ols_simple: x and y differ in length");
  if (x.size() < 3) fail(ErrorCode::insufficient_data, "ols_simple: need at least 3 observations");
  detail::check_finite(x, "ols_simple");
  detail::check_finite(y, "ols_simple");
  bool constant = true;
  for (double xi : x) constant = constant && xi == x.front();
  if (constant) fail(ErrorCode::singular_design, "ols_simple: predictor is constant");
  const std::vector<double> col(x.begin(), x.end());
  return detail::ols_qr(std::span<const std::vector<double>>(&col, 1), y, {});
}

/// Multiple regression y = b0 + sum_j b_j x_j. `names`, when given, label
/// predictor columns in error messages.
inline RegressionResult ols_multi(std::span<const std::vector<double>> columns,
                                  std::span<const double> y,
                                  std::span<const std::string> names = {}) {
  const std::size_t k = columns.size();
  if (k == 0) fail(ErrorCode::invalid_input, "ols_multi: no predictors");
  for (const auto& c : columns) {
    if (c.size() != y.size()) fail(ErrorCode::invalid_input, "ols_multi: column length mismatch");
    detail::check_finite(c, "ols_multi");
  }
  detail::check_finite(y, "ols_multi");
  if (y.size() < k + 2) {
    fail(ErrorCode::insufficient_data, "ols_multi: need at least " + std::to_string(k + 2) +
                                           " observations for " + std::to_string(k) + " predictors");
  }
  return detail::ols_qr(columns, y, names);
}

}  // namespace parasitech::stat
