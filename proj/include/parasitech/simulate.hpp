#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "parasitech/error.hpp"
#include "parasitech/evolution.hpp"
#include "parasitech/logistic.hpp"
#include "parasitech/series.hpp"

namespace parasitech::sim {

struct SimConfig {
  LogisticParams host;
  std::vector<LogisticParams> parasites;
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t n_points = 4;
  double noise_sigma = 0.0;   // sd of the multiplicative lognormal noise
  double missing_prob = 0.0;  // per-point drop probability, [0, 1)
  std::uint64_t seed = 0;
};

inline void validate(const SimConfig& c) {
  if (!(c.t_start < c.t_end)) fail(ErrorCode::invalid_input, "simulate: t_start must precede t_end");
  if (c.n_points < 4) fail(ErrorCode::invalid_input, "simulate: n_points must be at least 4");
  if (!(c.noise_sigma >= 0.0) || !std::isfinite(c.noise_sigma)) {
    fail(ErrorCode::invalid_input, "simulate: noise_sigma must be non-negative");
  }
  if (!(c.missing_prob >= 0.0 && c.missing_prob < 1.0)) {
    fail(ErrorCode::invalid_input, "simulate: missing_prob must lie in [0, 1)");
  }
  if (c.parasites.empty()) fail(ErrorCode::invalid_input, "simulate: at least one parasite required");
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for (replicate, series) under one master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate, std::uint64_t series) {
  return splitmix64(splitmix64(master) ^ splitmix64(replicate * 0x100000001b3ULL + series + 1));
}

/// Seeded source of uniforms and standard normals. The standard leaves the
/// output of std::*_distribution implementation-defined, so both transforms
/// are done here to keep fixtures identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (spare_) {
      const double z = *spare_;
      spare_.reset();
      return z;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

inline std::vector<double> linear_grid(double t_start, double t_end, std::size_t n) {
  std::vector<double> grid(n);
  const double step = (t_end - t_start) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = t_start + step * static_cast<double>(i);
  grid.back() = t_end;
  return grid;
}

/// value_t = logistic(t) * exp(sigma z_t); each point dropped with
/// probability missing_prob.
inline TechSeries simulate_series(const LogisticParams& params, std::span<const double> grid,
                                  double noise_sigma, double missing_prob, std::uint64_t seed,
                                  std::string name = "series", Role role = Role::parasite) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) fail(ErrorCode::invalid_input, "simulate: grid must be strictly increasing");
  }
  Rng rng(seed);
  std::vector<Observation> obs;
  obs.reserve(grid.size());
  for (double t : grid) {
    const double z = rng.normal();
    const double u = rng.uniform();
    if (u < missing_prob) continue;
    obs.push_back({t, logistic_value(params, t) * std::exp(noise_sigma * z)});
  }
  return TechSeries(std::move(name), role, "", std::move(obs));
}

struct SimulatedSystem {
  TechSeries host;
  std::vector<TechSeries> parasites;
};

inline SimulatedSystem simulate_system(const SimConfig& config, std::span<const double> grid,
                                       std::uint64_t replicate = 0) {
  validate(config);
  SimulatedSystem out{
      simulate_series(config.host, grid, config.noise_sigma, config.missing_prob,
                      derive_seed(config.seed, replicate, 0), "host", Role::host),
      {}};
  for (std::size_t i = 0; i < config.parasites.size(); ++i) {
    out.parasites.push_back(simulate_series(config.parasites[i], grid, config.noise_sigma,
                                            config.missing_prob,
                                            derive_seed(config.seed, replicate, i + 1),
                                            "parasite_" + std::to_string(i + 1), Role::parasite));
  }
  return out;
}

/// Host and parasites on the shared grid linspace(t_start, t_end, n_points).
inline SimulatedSystem simulate_pair(const SimConfig& config, std::uint64_t replicate = 0) {
  validate(config);
  const auto grid = linear_grid(config.t_start, config.t_end, config.n_points);
  return simulate_system(config, grid, replicate);
}

/// Time at which a logistic curve reaches `fraction` of K.
inline double time_at_fraction(const LogisticParams& p, double fraction) {
  return (p.a - std::log(1.0 / fraction - 1.0)) / p.b;
}

struct RecoverySummary {
  std::size_t replicates = 0;
  double true_B = 0.0;
  std::vector<double> estimates;  // sorted ascending
  std::size_t failures = 0;
  std::size_t perfect_fits = 0;
  double bias = 0.0;
  double rmse = 0.0;
  // Share of replicates whose 95% CI contains true_B; empty when every fit
  // was perfect and no interval exists.
  std::optional<double> coverage_95;
  double window_start = 0.0;
  double window_end = 0.0;
};

struct RecoveryOptions {
  bool early_phase_only = false;
  double early_threshold = 0.1;  // fraction of K both curves stay below
  double alpha = default_alpha;
};

/// Repeats simulate -> fit_evolution and summarizes how well B = b2 / b1 of
/// the first parasite is recovered. In early-phase mode the sampling window
/// ends where either curve reaches early_threshold * K.
inline RecoverySummary monte_carlo_recovery(const SimConfig& config, std::size_t replicates,
                                            const RecoveryOptions& options = {}) {
  validate(config);
  if (replicates < 1) fail(ErrorCode::invalid_input, "recover: replicates must be at least 1");
  const auto& parasite = config.parasites.front();

  double t_end = config.t_end;
  if (options.early_phase_only) {
    if (!(options.early_threshold > 0.0 && options.early_threshold < 1.0)) {
      fail(ErrorCode::invalid_input, "recover: early threshold must lie in (0, 1)");
    }
    t_end = std::min({t_end, time_at_fraction(config.host, options.early_threshold),
                      time_at_fraction(parasite, options.early_threshold)});
    if (!(t_end > config.t_start)) {
      fail(ErrorCode::invalid_input, "recover: no early-phase window after t_start");
    }
  }
  const auto grid = linear_grid(config.t_start, t_end, config.n_points);

  RecoverySummary out;
  out.replicates = replicates;
  out.true_B = parasite.b / config.host.b;
  out.window_start = config.t_start;
  out.window_end = t_end;

  std::size_t with_interval = 0;
  std::size_t covered = 0;
  std::map<double, double> quantiles;
  SimConfig single = config;
  single.parasites = {parasite};
  for (std::size_t r = 0; r < replicates; ++r) {
    try {
      const auto system = simulate_system(single, grid, r);
      const auto fit = fit_evolution(system.host, system.parasites.front(), options.alpha);
      out.estimates.push_back(fit.B);
      if (fit.regression.perfect_fit) {
        ++out.perfect_fits;
        continue;
      }
      const double df = static_cast<double>(fit.regression.df_residual());
      auto it = quantiles.find(df);
      if (it == quantiles.end()) it = quantiles.emplace(df, stat::student_t_quantile(0.975, df)).first;
      ++with_interval;
      if (std::fabs(fit.B - out.true_B) <= it->second * fit.regression.standard_errors[1]) ++covered;
    } catch (const Error&) {
      ++out.failures;
    }
  }
  if (out.estimates.empty()) {
    fail(ErrorCode::fit_failure, "recover: all " + std::to_string(replicates) + " replicate fits failed");
  }
  std::sort(out.estimates.begin(), out.estimates.end());
  double sum = 0.0;
  double sq = 0.0;
  for (double b : out.estimates) {
    sum += b;
    sq += (b - out.true_B) * (b - out.true_B);
  }
  const double m = static_cast<double>(out.estimates.size());
  out.bias = sum / m - out.true_B;
  out.rmse = std::sqrt(sq / m);
  if (with_interval > 0) out.coverage_95 = static_cast<double>(covered) / static_cast<double>(with_interval);
  return out;
}

}  // namespace parasitech::sim
