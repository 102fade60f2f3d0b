#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parasitech/classify.hpp"
#include "parasitech/error.hpp"
#include "parasitech/ols.hpp"
#include "parasitech/series.hpp"
#include "parasitech/stats.hpp"

namespace parasitech {

enum class AlignMode { pairwise, listwise };

/// Rows of natural-log values on common years. Column 0 is the host.
struct AlignedTable {
  std::vector<std::string> names;
  std::vector<double> years;
  std::vector<std::vector<double>> log_columns;
};

namespace detail {

inline std::vector<double> intersect_years(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::vector<double> log_at_years(const TechSeries& s, const std::vector<double>& years) {
  std::vector<double> out;
  out.reserve(years.size());
  const auto& obs = s.observations();
  std::size_t i = 0;
  for (double y : years) {
    while (obs[i].t < y) ++i;
    out.push_back(std::log(obs[i].value));
  }
  return out;
}

inline AlignedTable make_table(const std::vector<const TechSeries*>& series, const std::vector<double>& years) {
  AlignedTable t;
  t.years = years;
  for (const auto* s : series) {
    t.names.push_back(s->name());
    t.log_columns.push_back(log_at_years(*s, years));
  }
  return t;
}

}  // namespace detail

/// Pairwise: one table per parasite over the years it shares with the host.
/// Listwise: a single table over the years present in every series.
inline std::vector<AlignedTable> align_by_year(const TechSeries& host,
                                               const std::vector<TechSeries>& parasites,
                                               AlignMode mode) {
  if (parasites.empty()) fail(ErrorCode::invalid_input, "align_by_year: no parasite series");
  const auto host_years = host.times();
  std::vector<AlignedTable> out;
  if (mode == AlignMode::pairwise) {
    for (const auto& p : parasites) {
      const auto years = detail::intersect_years(host_years, p.times());
      if (years.empty()) {
        fail(ErrorCode::no_overlap, "no overlapping years between '" + host.name() + "' and '" +
                                        p.name() + "'");
      }
      out.push_back(detail::make_table({&host, &p}, years));
    }
    return out;
  }
  auto years = host_years;
  std::vector<const TechSeries*> all{&host};
  std::string names = "'" + host.name() + "'";
  for (const auto& p : parasites) {
    years = detail::intersect_years(years, p.times());
    all.push_back(&p);
    names += ", '" + p.name() + "'";
  }
  if (years.empty()) fail(ErrorCode::no_overlap, "no year common to all of " + names);
  out.push_back(detail::make_table(all, years));
  return out;
}

/// log P_t = log A + B log H_t + u_t, fitted by OLS and graded.
struct EvolutionFit {
  std::string host_name;
  std::string parasite_name;
  stat::RegressionResult regression;
  double B = 0.0;
  double log_A = 0.0;
  EvolutionClass classification;
  std::size_t n_paired = 0;
  std::vector<double> years_used;
  std::vector<double> log_host;
  std::vector<double> log_parasite;
};

inline EvolutionFit fit_evolution(const TechSeries& host, const TechSeries& parasite,
                                  double alpha = default_alpha) {
  const auto table = align_by_year(host, {parasite}, AlignMode::pairwise).front();
  if (table.years.size() < 4) {
    fail(ErrorCode::insufficient_data, "fit_evolution: '" + host.name() + "' and '" + parasite.name() +
                                           "' share " + std::to_string(table.years.size()) +
                                           " years, need at least 4");
  }
  EvolutionFit fit;
  fit.host_name = host.name();
  fit.parasite_name = parasite.name();
  fit.years_used = table.years;
  fit.log_host = table.log_columns[0];
  fit.log_parasite = table.log_columns[1];
  fit.n_paired = table.years.size();
  try {
    fit.regression = stat::ols_simple(fit.log_host, fit.log_parasite);
  } catch (const Error& e) {
    throw Error(e.code(), "fit_evolution ('" + host.name() + "' -> '" + parasite.name() + "'): " + e.what());
  }
  fit.log_A = fit.regression.coefficients[0];
  fit.B = fit.regression.coefficients[1];
  const double se = fit.regression.standard_errors[1];
  if (fit.regression.perfect_fit || !(se > 0.0)) {
    fit.classification = classify_point(fit.B);
  } else {
    fit.classification = classify_with_test(fit.B, se, static_cast<long>(fit.n_paired), alpha);
  }
  return fit;
}

/// log P_1t = log a + B_1 log H_t + B_2 log P_2t + ... + B_m log P_mt + e_t
struct MultiEvolutionFit {
  std::string target_parasite;
  std::vector<std::string> predictor_names;  // host first, then other parasites
  stat::RegressionResult regression;
  std::vector<std::string> dominant_predictors;  // by |standardized coefficient|, descending
  std::vector<std::string> significant_predictors;  // p < alpha, in input order
  double alpha = default_alpha;
  std::size_t n_listwise = 0;
  std::vector<double> years_used;
  std::vector<double> log_target;
};

inline MultiEvolutionFit fit_evolution_multi(const TechSeries& target, const TechSeries& host,
                                             const std::vector<TechSeries>& others,
                                             double alpha = default_alpha) {
  std::vector<TechSeries> parasites{target};
  parasites.insert(parasites.end(), others.begin(), others.end());
  const auto table = align_by_year(host, parasites, AlignMode::listwise).front();

  // table columns: host, target, others...
  std::vector<std::vector<double>> predictors{table.log_columns[0]};
  std::vector<std::string> names{table.names[0]};
  for (std::size_t j = 2; j < table.log_columns.size(); ++j) {
    predictors.push_back(table.log_columns[j]);
    names.push_back(table.names[j]);
  }
  const std::size_t n = table.years.size();
  if (n < predictors.size() + 2) {
    fail(ErrorCode::insufficient_data, "fit_evolution_multi: " + std::to_string(n) +
                                           " complete years for " + std::to_string(predictors.size()) +
                                           " predictors");
  }

  MultiEvolutionFit fit;
  fit.target_parasite = target.name();
  fit.predictor_names = names;
  fit.n_listwise = n;
  fit.years_used = table.years;
  fit.log_target = table.log_columns[1];
  fit.regression = stat::ols_multi(predictors, fit.log_target, names);

  std::vector<std::size_t> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  auto magnitude = [&](std::size_t j) {
    const auto& s = fit.regression.standardized_coefficients[j + 1];
    return s ? std::fabs(*s) : 0.0;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return magnitude(l) > magnitude(r); });
  for (std::size_t j : order) fit.dominant_predictors.push_back(names[j]);
  fit.alpha = alpha;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (fit.regression.p_values[j + 1] < alpha) fit.significant_predictors.push_back(names[j]);
  }
  return fit;
}

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<stat::CorrelationEntry>> cells;

  bool empty() const noexcept { return names.empty(); }
};

/// Pearson correlations of log values with pairwise deletion by year. Cells
/// with fewer than 3 shared years or a constant side stay undefined.
inline CorrelationMatrix correlation_matrix(const std::vector<TechSeries>& series) {
  if (series.size() < 2) fail(ErrorCode::invalid_input, "correlation_matrix: need at least 2 series");
  std::vector<double> all_years;
  for (const auto& s : series) {
    const auto t = s.times();
    all_years.insert(all_years.end(), t.begin(), t.end());
  }
  std::sort(all_years.begin(), all_years.end());
  all_years.erase(std::unique(all_years.begin(), all_years.end()), all_years.end());

  std::vector<std::vector<std::optional<double>>> cols;
  for (const auto& s : series) {
    std::vector<std::optional<double>> col(all_years.size());
    for (const auto& o : s.observations()) {
      const auto it = std::lower_bound(all_years.begin(), all_years.end(), o.t);
      col[static_cast<std::size_t>(it - all_years.begin())] = std::log(o.value);
    }
    cols.push_back(std::move(col));
  }

  CorrelationMatrix m;
  const std::size_t k = series.size();
  for (const auto& s : series) m.names.push_back(s.name());
  m.cells.assign(k, std::vector<stat::CorrelationEntry>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      stat::CorrelationEntry e;
      std::size_t shared = 0;
      for (std::size_t r = 0; r < all_years.size(); ++r) shared += (cols[i][r] && cols[j][r]) ? 1 : 0;
      e.n = shared;
      if (i == j) {
        e.r = 1.0;
        if (shared >= 3) e.p = 0.0;
      } else {
        try {
          e = stat::pearson(std::span<const std::optional<double>>(cols[i]),
                            std::span<const std::optional<double>>(cols[j]));
        } catch (const Error&) {
          e.n = shared;  // undefined cell
        }
      }
      m.cells[i][j] = e;
      m.cells[j][i] = e;
    }
  }
  return m;
}

struct NamedDescriptive {
  std::string name;
  Role role;
  std::string units;
  stat::DescriptiveStats stats;  // of natural-log values
};

struct Trajectory {
  std::string name;
  std::vector<double> t;
  std::vector<double> z;  // standardized raw values
};

struct ReportRequest {
  TechSeries host;
  std::vector<TechSeries> parasites;
  bool pairwise_fits = true;
  bool multi_fit = false;  // first parasite on host plus remaining parasites
};

enum class CorrelationPolicy { automatic, always, never };

struct ReportOptions {
  double alpha = default_alpha;
  CorrelationPolicy correlations = CorrelationPolicy::automatic;
  std::vector<std::string> input_files;
  std::vector<std::pair<std::string, std::string>> settings;  // echoed into provenance
  std::optional<std::string> timestamp;
};

struct Provenance {
  std::vector<std::string> input_files;
  std::vector<std::pair<std::string, std::string>> settings;
  std::optional<std::string> timestamp;
  double alpha = default_alpha;
};

struct AnalysisReport {
  std::vector<EvolutionFit> fits;
  std::vector<MultiEvolutionFit> multi_fits;
  CorrelationMatrix correlations;
  std::vector<NamedDescriptive> descriptives;
  std::vector<Trajectory> standardized_trajectories;
  Provenance provenance;
  std::vector<std::string> warnings;
};

/// Runs the requested fits and gathers correlations, log-scale descriptives
/// and standardized trajectories for every series involved. Correlations are
/// computed automatically only when at least three series are present; with
/// two, the fit's R^2 already carries the same information.
inline AnalysisReport build_report(const ReportRequest& request, const ReportOptions& options) {
  if (!request.pairwise_fits && !request.multi_fit) {
    fail(ErrorCode::invalid_input, "build_report: no fit requested");
  }
  if (request.parasites.empty()) fail(ErrorCode::invalid_input, "build_report: no parasite series");

  AnalysisReport report;
  report.provenance.input_files = options.input_files;
  report.provenance.settings = options.settings;
  report.provenance.timestamp = options.timestamp;
  report.provenance.alpha = options.alpha;

  if (request.pairwise_fits) {
    for (const auto& p : request.parasites) {
      report.fits.push_back(fit_evolution(request.host, p, options.alpha));
    }
  }
  if (request.multi_fit) {
    if (request.parasites.size() < 2) {
      fail(ErrorCode::invalid_input, "multidimensional fit needs at least two parasite series");
    }
    const std::vector<TechSeries> others(request.parasites.begin() + 1, request.parasites.end());
    report.multi_fits.push_back(
        fit_evolution_multi(request.parasites.front(), request.host, others, options.alpha));
  }

  std::vector<TechSeries> all{request.host};
  all.insert(all.end(), request.parasites.begin(), request.parasites.end());

  const bool want_corr = options.correlations == CorrelationPolicy::always ||
                         (options.correlations == CorrelationPolicy::automatic && all.size() >= 3);
  if (want_corr) report.correlations = correlation_matrix(all);

  for (const auto& s : all) {
    const auto logs = s.log_values();
    report.descriptives.push_back({s.name(), s.role(), s.units(), stat::descriptive(logs)});
    const auto raw = s.values();
    try {
      report.standardized_trajectories.push_back({s.name(), s.times(), stat::zscore(raw)});
    } catch (const Error& e) {
      report.warnings.push_back("series '" + s.name() + "' not standardized: " + e.what());
    }
  }

  for (const auto& f : report.fits) {
    if (f.classification.negative_b) {
      report.warnings.push_back("fit '" + f.parasite_name + "': negative B graded as parasitism");
    }
    if (f.regression.perfect_fit) {
      report.warnings.push_back("fit '" + f.parasite_name +
                                "': zero residual variance, p-values reported as 0");
    }
  }
  return report;
}

}  // namespace parasitech
