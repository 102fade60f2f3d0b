#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "parasitech/error.hpp"

namespace parasitech {

enum class Role { host, parasite };

inline const char* to_string(Role role) noexcept {
  return role == Role::host ? "host" : "parasite";
}

struct Observation {
  double t;      // calendar year (CE), may be fractional
  double value;  // FMT level, strictly positive

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// One functional measure of technology observed over time.
///
/// Construction validates the invariants every downstream operation relies
/// on: strictly increasing finite times and strictly positive finite values,
/// so that the natural log of every value is defined.
class TechSeries {
 public:
  TechSeries(std::string name, Role role, std::string units,
             std::vector<Observation> observations)
      : name_(std::move(name)),
        role_(role),
        units_(std::move(units)),
        observations_(std::move(observations)) {
    for (std::size_t i = 0; i < observations_.size(); ++i) {
      const auto& [t, v] = observations_[i];
      if (!std::isfinite(t)) {
        fail(ErrorCode::invalid_input,
             "series '" + name_ + "': non-finite time at index " + std::to_string(i));
      }
      if (!std::isfinite(v) || v <= 0.0) {
        fail(ErrorCode::invalid_input,
             "series '" + name_ + "': value must be positive and finite at t=" +
                 std::to_string(t));
      }
      if (i > 0 && !(observations_[i - 1].t < t)) {
        fail(ErrorCode::invalid_input,
             "series '" + name_ + "': times must be strictly increasing (t=" +
                 std::to_string(t) + ")");
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  Role role() const noexcept { return role_; }
  const std::string& units() const noexcept { return units_; }
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  std::size_t size() const noexcept { return observations_.size(); }
  bool empty() const noexcept { return observations_.empty(); }

  std::vector<double> times() const {
    std::vector<double> out;
    out.reserve(observations_.size());
    for (const auto& o : observations_) out.push_back(o.t);
    return out;
  }

  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(observations_.size());
    for (const auto& o : observations_) out.push_back(o.value);
    return out;
  }

  std::vector<double> log_values() const {
    std::vector<double> out;
    out.reserve(observations_.size());
    for (const auto& o : observations_) out.push_back(std::log(o.value));
    return out;
  }

  double max_value() const {
    double m = 0.0;
    for (const auto& o : observations_) m = std::max(m, o.value);
    return m;
  }

  /// Same observations with every value multiplied by `factor` (> 0).
  TechSeries rescaled(double factor) const {
    auto obs = observations_;
    for (auto& o : obs) o.value *= factor;
    return TechSeries(name_, role_, units_, std::move(obs));
  }

  TechSeries renamed(std::string name, Role role) const {
    return TechSeries(std::move(name), role, units_, observations_);
  }

 private:
  std::string name_;
  Role role_;
  std::string units_;
  std::vector<Observation> observations_;
};

}  // namespace parasitech
