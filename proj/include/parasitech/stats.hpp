#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parasitech/distributions.hpp"
#include "parasitech/error.hpp"

namespace parasitech::stat {

inline double mean(std::span<const double> v) {
  if (v.empty()) fail(ErrorCode::insufficient_data, "mean of empty sequence");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double sample_sd(std::span<const double> v) {
  const double m = mean(v);
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

struct DescriptiveStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  std::optional<double> skewness;  // undefined for n < 3 or sd == 0
  std::optional<double> kurtosis;  // excess; undefined for n < 4 or sd == 0
};

/// Moments with the small-sample adjustments used by common statistics
/// packages: adjusted Fisher-Pearson skewness G1 and excess kurtosis G2.
inline DescriptiveStats descriptive(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::insufficient_data, "descriptive: no values");
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::invalid_input, "descriptive: non-finite value");
  }
  DescriptiveStats out;
  out.n = values.size();
  out.mean = mean(values);
  out.sd = sample_sd(values);

  bool all_equal = true;
  for (double v : values) all_equal = all_equal && v == values.front();
  if (all_equal) out.sd = 0.0;
  if (out.sd == 0.0) return out;

  const double n = static_cast<double>(out.n);
  double s3 = 0.0;
  double s4 = 0.0;
  for (double v : values) {
    const double z = (v - out.mean) / out.sd;
    s3 += z * z * z;
    s4 += z * z * z * z;
  }
  if (out.n >= 3) out.skewness = n / ((n - 1.0) * (n - 2.0)) * s3;
  if (out.n >= 4) {
    out.kurtosis = n * (n + 1.0) / ((n - 1.0) * (n - 2.0) * (n - 3.0)) * s4 -
                   3.0 * (n - 1.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
  }
  return out;
}

/// Standardize to mean 0 and sample sd 1. Below-mean values map to negative
/// scores.
inline std::vector<double> zscore(std::span<const double> values) {
  if (values.size() < 2) fail(ErrorCode::insufficient_data, "zscore: need at least 2 values");
  const double m = mean(values);
  const double sd = sample_sd(values);
  if (!(sd > 0.0)) fail(ErrorCode::degenerate_series, "zscore: series has zero variance");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - m) / sd);
  return out;
}

struct CorrelationEntry {
  std::optional<double> r;  // empty when undefined (n < 3 or a constant side)
  std::optional<double> p;  // two-sided; empty when r is undefined or n < 3
  std::size_t n = 0;        // pairs used after pairwise deletion
};

/// Pearson correlation with pairwise deletion of missing entries.
inline CorrelationEntry pearson(std::span<const std::optional<double>> x,
                                std::span<const std::optional<double>> y) {
  if (x.size() != y.size()) fail(ErrorCode::invalid_input, "pearson: length mismatch");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i]) {
      xs.push_back(*x[i]);
      ys.push_back(*y[i]);
    }
  }
  const std::size_t n = xs.size();
  if (n < 3) {
    fail(ErrorCode::insufficient_data,
         "pearson: " + std::to_string(n) + " complete pairs, need at least 3");
  }
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(xs) || constant(ys) || sxx == 0.0 || syy == 0.0) {
    fail(ErrorCode::undefined_correlation, "pearson: one side is constant");
  }
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);

  CorrelationEntry out;
  out.r = r;
  out.n = n;
  const double df = static_cast<double>(n - 2);
  if (std::fabs(r) == 1.0) {
    out.p = 0.0;
  } else {
    const double t = r * std::sqrt(df / (1.0 - r * r));
    out.p = student_t_sf(t, df);
  }
  return out;
}

inline CorrelationEntry pearson(std::span<const double> x, std::span<const double> y) {
  std::vector<std::optional<double>> xo(x.begin(), x.end());
  std::vector<std::optional<double>> yo(y.begin(), y.end());
  return pearson(std::span<const std::optional<double>>(xo),
                 std::span<const std::optional<double>>(yo));
}

}  // namespace parasitech::stat
