#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "parasitech/distributions.hpp"
#include "parasitech/error.hpp"

namespace parasitech {

enum class Mode { parasitism, mutualism, symbiosis };
enum class EvolutionLabel { underdevelopment, growth, development };

constexpr std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::parasitism: return "parasitism";
    case Mode::mutualism: return "mutualism";
    case Mode::symbiosis: return "symbiosis";
  }
  return "";
}

constexpr std::string_view to_string(EvolutionLabel l) noexcept {
  switch (l) {
    case EvolutionLabel::underdevelopment: return "underdevelopment";
    case EvolutionLabel::growth: return "growth";
    case EvolutionLabel::development: return "development";
  }
  return "";
}

/// Outcome of testing H0: B = 1.
struct UnitSlopeTest {
  double t_stat;
  double p_value;
  double alpha;
  double df;
};

/// One row of the evolution scale, plus the coefficient that selected it.
struct EvolutionClass {
  int grade = 2;
  Mode mode = Mode::mutualism;
  EvolutionLabel label = EvolutionLabel::growth;
  std::string_view symbol = "+";
  std::string_view prediction;
  double b_estimate = 1.0;
  std::optional<UnitSlopeTest> test;
  // B < 0: outside the range the scale was built for; still reported as grade 1.
  bool negative_b = false;
};

inline constexpr double exact_tolerance = 1e-9;
inline constexpr double default_alpha = 0.05;

inline std::string_view prediction_label(int grade) {
  switch (grade) {
    case 1: return "Complex system of technology evolves slowly over time";
    case 2: return "Complex system of technology has a steady-state growth";
    case 3: return "Complex system of technology is likely to evolve rapidly";
    default:
      fail(ErrorCode::invalid_input, "prediction_label: grade must be 1, 2 or 3, got " +
                                         std::to_string(grade));
  }
}

namespace detail {

inline EvolutionClass make_class(int grade, double b) {
  EvolutionClass c;
  c.grade = grade;
  c.b_estimate = b;
  c.prediction = prediction_label(grade);
  switch (grade) {
    case 1:
      c.mode = Mode::parasitism;
      c.label = EvolutionLabel::underdevelopment;
      c.symbol = "/";
      break;
    case 2:
      c.mode = Mode::mutualism;
      c.label = EvolutionLabel::growth;
      c.symbol = "+";
      break;
    default:
      c.mode = Mode::symbiosis;
      c.label = EvolutionLabel::development;
      c.symbol = "!";
      break;
  }
  c.negative_b = b < 0.0;
  return c;
}

}  // namespace detail

/// Grade by direct comparison with 1 (tolerance 1e-9).
inline EvolutionClass classify_point(double b) {
  if (!std::isfinite(b)) fail(ErrorCode::invalid_input, "classify: B must be finite");
  int grade = 2;
  if (b < 1.0 - exact_tolerance) grade = 1;
  else if (b > 1.0 + exact_tolerance) grade = 3;
  return detail::make_class(grade, b);
}

/// Grade by a two-sided t-test of B = 1 with n - 2 degrees of freedom.
/// Failing to reject gives grade 2; otherwise the sign of B - 1 decides.
inline EvolutionClass classify_with_test(double b, double se_b, long n,
                                         double alpha = default_alpha) {
  if (!std::isfinite(b)) fail(ErrorCode::invalid_input, "classify: B must be finite");
  if (n < 3) fail(ErrorCode::insufficient_data, "classify: need n >= 3 for the t-test");
  if (!(se_b > 0.0) || !std::isfinite(se_b)) {
    fail(ErrorCode::invalid_input, "classify: standard error must be positive");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorCode::invalid_input, "classify: alpha must lie in (0, 1)");
  }
  const double df = static_cast<double>(n - 2);
  const double t = (b - 1.0) / se_b;
  const double p = stat::student_t_sf(t, df);
  int grade = 2;
  if (p < alpha) grade = b > 1.0 ? 3 : 1;
  auto c = detail::make_class(grade, b);
  c.test = UnitSlopeTest{t, p, alpha, df};
  return c;
}

}  // namespace parasitech
