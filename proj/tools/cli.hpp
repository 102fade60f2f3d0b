#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "parasitech/parasitech.hpp"

namespace parasitech::cli {

enum ExitCode : int { ok = 0, data_error = 2, fit_error = 3, usage_error = 4 };

inline int exit_code_for(ErrorCode code) {
  return code == ErrorCode::fit_failure ? fit_error : data_error;
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string basename(const std::string& path) {
  return std::filesystem::path(path).filename().string();
}

inline io::SeriesFile load(const std::string& path, Role role, const std::string& aggregator,
                           std::ostream& err) {
  auto file = io::parse_series_csv(path, "", role, "", io::parse_aggregator(aggregator));
  for (const auto& w : file.warnings) err << "warning: " << path << ": " << w << "\n";
  return file;
}

inline std::uint64_t default_seed() {
  const char* env = std::getenv("PARASITECH_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw UsageError("PARASITECH_SEED is not an unsigned integer: '" + std::string(env) + "'");
  }
}

inline LogisticParams logistic_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::format, where + ": expected an object");
  const double K = j.at("K").get<double>();
  const double b = j.at("b").get<double>();
  if (j.contains("t_mid")) return LogisticParams::from_midpoint(K, b, j.at("t_mid").get<double>());
  if (j.contains("a")) return LogisticParams(K, j.at("a").get<double>(), b);
  fail(ErrorCode::format, where + ": needs 't_mid' or 'a'");
}

inline sim::SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  try {
    const auto j = nlohmann::json::parse(in);
    sim::SimConfig c;
    c.host = logistic_from_json(j.at("host"), "host");
    if (j.contains("parasites")) {
      for (std::size_t i = 0; i < j.at("parasites").size(); ++i) {
        c.parasites.push_back(logistic_from_json(j.at("parasites")[i], "parasites[" + std::to_string(i) + "]"));
      }
    } else {
      c.parasites.push_back(logistic_from_json(j.at("parasite"), "parasite"));
    }
    c.t_start = j.at("t_start").get<double>();
    c.t_end = j.at("t_end").get<double>();
    c.n_points = j.at("n_points").get<std::size_t>();
    c.noise_sigma = j.value("noise_sigma", 0.0);
    c.missing_prob = j.value("missing_prob", 0.0);
    c.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : default_seed();
    return c;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format, path + ": " + e.what());
  }
}

inline std::string correlations_csv(const CorrelationMatrix& m) {
  std::string out = "row,column,r,p,n\n";
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    for (std::size_t j = 0; j < m.names.size(); ++j) {
      const auto& c = m.cells[i][j];
      out += io::detail::csv_field(m.names[i]) + "," + io::detail::csv_field(m.names[j]) + "," +
             (c.r ? io::format_number(*c.r) : "") + "," + (c.p ? io::format_number(*c.p) : "") + "," +
             std::to_string(c.n) + "\n";
    }
  }
  return out;
}

}  // namespace detail

/// Parses argv, runs one subcommand and returns its exit status. Output goes
/// to `out`; diagnostics go to `err` as `error[<code>]: <message>` lines.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Host-parasite technology evolution toolkit", "parasitech"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", io::tool_version);

  const std::vector<std::string> formats{"text", "json", "csv"};
  const std::vector<std::string> aggregators{"mean", "median", "max"};

  // evolve / evolve-multi
  std::string host_path;
  std::vector<std::string> parasite_paths;
  double alpha = default_alpha;
  std::string format = "text";
  std::string plot_prefix;
  std::string aggregator = "mean";
  std::string timestamp;

  auto add_evolve_options = [&](CLI::App* sub, std::size_t min_parasites) {
    sub->add_option("--host", host_path, "Host technology series (CSV t,value)")->required();
    sub->add_option("--parasite", parasite_paths, "Parasite series (CSV t,value); repeatable")
        ->required();
    sub->callback([&, sub, min_parasites] {
      if (parasite_paths.size() < min_parasites) {
        throw CLI::ValidationError("--parasite", sub->get_name() + " needs at least " +
                                                     std::to_string(min_parasites) + " parasite series");
      }
    });
    sub->add_option("--alpha", alpha, "Significance level of the B = 1 test")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12));
    sub->add_option("--format", format, "Report format")->check(CLI::IsMember(formats));
    sub->add_option("--plot-data", plot_prefix, "Write plot CSVs using this path prefix");
    sub->add_option("--aggregator", aggregator, "Duplicate-year aggregator")
        ->check(CLI::IsMember(aggregators));
    sub->add_option("--timestamp", timestamp, "Timestamp recorded in the JSON report metadata");
  };
  auto* evolve = app.add_subcommand("evolve", "Fit log P = log A + B log H for each parasite and grade B");
  add_evolve_options(evolve, 1);
  auto* evolve_multi = app.add_subcommand(
      "evolve-multi", "Regress the first parasite on the host and the remaining parasites (log-log)");
  add_evolve_options(evolve_multi, 2);

  // fit-logistic / forecast / stats / standardize
  std::string input_path;
  double k_max_factor = 10.0;
  auto* fit_logistic_cmd = app.add_subcommand("fit-logistic", "Fit a logistic growth curve to one series");
  fit_logistic_cmd->add_option("--input", input_path, "Series CSV")->required();
  fit_logistic_cmd->add_option("--k-max-factor", k_max_factor, "Upper bound of K as a multiple of the max value")
      ->check(CLI::PositiveNumber);
  fit_logistic_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  fit_logistic_cmd->add_option("--aggregator", aggregator, "Duplicate-year aggregator")
      ->check(CLI::IsMember(aggregators));

  double forecast_to = 0.0;
  double forecast_step = 1.0;
  auto* forecast = app.add_subcommand("forecast", "Extrapolate a fitted logistic curve");
  forecast->add_option("--input", input_path, "Series CSV")->required();
  forecast->add_option("--to", forecast_to, "Last forecast time")->required();
  forecast->add_option("--step", forecast_step, "Time step")->check(CLI::PositiveNumber);
  forecast->add_option("--k-max-factor", k_max_factor, "Upper bound of K as a multiple of the max value")
      ->check(CLI::PositiveNumber);
  forecast->add_option("--aggregator", aggregator, "Duplicate-year aggregator")
      ->check(CLI::IsMember(aggregators));

  std::vector<std::string> series_paths;
  auto* correlate = app.add_subcommand("correlate", "Pearson correlations of log values, pairwise deletion");
  correlate->add_option("--series", series_paths, "Series CSV; repeatable")->required();
  correlate->callback([&] {
    if (series_paths.size() < 2) throw CLI::ValidationError("--series", "correlate needs at least 2 series");
  });
  correlate->add_option("--format", format, "Output format")->check(CLI::IsMember(formats));
  correlate->add_option("--aggregator", aggregator, "Duplicate-year aggregator")
      ->check(CLI::IsMember(aggregators));

  double b_value = 0.0;
  std::optional<double> se_value;
  std::optional<long> n_value;
  auto* classify = app.add_subcommand("classify", "Grade an evolutionary coefficient B");
  classify->add_option("--b", b_value, "Estimated coefficient B")->required();
  classify->add_option("--se", se_value, "Standard error of B (enables the t-test)");
  classify->add_option("--n", n_value, "Sample size behind B (with --se)");
  classify->add_option("--alpha", alpha, "Significance level of the B = 1 test")
      ->check(CLI::Range(1e-12, 1.0 - 1e-12));

  double k1 = 0, b1 = 0, t1 = 0, k2 = 0, b2 = 0, t2 = 0, t_start = 0, t_end = 0;
  std::size_t n_points = 0;
  double noise = 0.0;
  double missing = 0.0;
  std::optional<std::uint64_t> seed;
  std::string out_prefix = "sim_";
  auto* simulate = app.add_subcommand("simulate", "Generate a host and a parasite logistic series");
  simulate->add_option("--k1", k1, "Host equilibrium level K1")->required();
  simulate->add_option("--b1", b1, "Host growth rate b1")->required();
  simulate->add_option("--t1", t1, "Host inflection time t1 = a1/b1")->required();
  simulate->add_option("--k2", k2, "Parasite equilibrium level K2")->required();
  simulate->add_option("--b2", b2, "Parasite growth rate b2")->required();
  simulate->add_option("--t2", t2, "Parasite inflection time t2 = a2/b2")->required();
  simulate->add_option("--t-start", t_start, "First grid time")->required();
  simulate->add_option("--t-end", t_end, "Last grid time")->required();
  simulate->add_option("--n", n_points, "Grid points")->required();
  simulate->add_option("--noise", noise, "Lognormal noise sd (log scale)");
  simulate->add_option("--missing", missing, "Per-point drop probability");
  simulate->add_option("--seed", seed, "Master seed (default: $PARASITECH_SEED or 0)");
  simulate->add_option("--out-prefix", out_prefix, "Output path prefix; writes <prefix>host.csv, <prefix>parasite.csv");

  std::string config_path;
  std::size_t replicates = 200;
  bool early_phase = false;
  double early_threshold = 0.1;
  auto* recover = app.add_subcommand("recover", "Monte Carlo recovery of B = b2/b1");
  recover->add_option("--config", config_path, "Simulation config JSON")->required();
  recover->add_option("--replicates", replicates, "Number of replicates")->check(CLI::PositiveNumber);
  recover->add_flag("--early-phase", early_phase, "Sample only while both curves stay below the threshold");
  recover->add_option("--early-threshold", early_threshold, "Early-phase fraction of K")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  recover->add_option("--seed", seed, "Master seed (overrides the config and $PARASITECH_SEED)");
  recover->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

  bool log_scale = false;
  auto* stats = app.add_subcommand("stats", "Descriptive statistics of one series");
  stats->add_option("--input", input_path, "Series CSV")->required();
  stats->add_flag("--log", log_scale, "Use natural-log values");
  stats->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  stats->add_option("--aggregator", aggregator, "Duplicate-year aggregator")
      ->check(CLI::IsMember(aggregators));

  auto* standardize = app.add_subcommand("standardize", "Z-score a series (mean 0, sample sd 1)");
  standardize->add_option("--input", input_path, "Series CSV")->required();
  standardize->add_option("--aggregator", aggregator, "Duplicate-year aggregator")
      ->check(CLI::IsMember(aggregators));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << io::tool_version << "\n";
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << "\n";
    return usage_error;
  }

  try {
    if (evolve->parsed() || evolve_multi->parsed()) {
      const bool multi = evolve_multi->parsed();
      auto host = detail::load(host_path, Role::host, aggregator, err);
      std::vector<TechSeries> parasites;
      ReportOptions options;
      options.alpha = alpha;
      options.input_files.push_back(detail::basename(host_path));
      for (const auto& p : parasite_paths) {
        parasites.push_back(detail::load(p, Role::parasite, aggregator, err).parsed);
        options.input_files.push_back(detail::basename(p));
      }
      options.settings = {{"command", multi ? "evolve-multi" : "evolve"},
                          {"alpha", io::format_number(alpha)},
                          {"aggregator", aggregator}};
      if (!timestamp.empty()) options.timestamp = timestamp;
      ReportRequest request{host.parsed, parasites, !multi, multi};
      const auto report = build_report(request, options);
      out << io::render_report(report, io::parse_format(format));
      if (!plot_prefix.empty()) {
        for (const auto& p : io::emit_plot_data(report, plot_prefix)) err << "wrote " << p.string() << "\n";
      }
      return ok;
    }

    if (fit_logistic_cmd->parsed()) {
      const auto series = detail::load(input_path, Role::host, aggregator, err).parsed;
      const auto fit = parasitech::fit_logistic(series, k_max_factor);
      const auto& p = fit.params;
      if (format == "json") {
        nlohmann::ordered_json j;
        j["series"] = series.name();
        j["K"] = io::detail::num(p.K);
        j["a"] = io::detail::num(p.a);
        j["b"] = io::detail::num(p.b);
        j["t_mid"] = io::detail::num(p.inflection_time());
        j["r2_logit"] = io::detail::num(fit.r2_logit);
        j["k_at_bound"] = fit.k_at_bound;
        j["k_search"] = {io::detail::num(fit.k_lower), io::detail::num(fit.k_upper)};
        j["n"] = fit.n;
        out << j.dump(2) << "\n";
      } else {
        out << "series: " << series.name() << " (n = " << fit.n << ")\n"
            << "K = " << io::format_number(p.K) << "\n"
            << "a = " << io::format_number(p.a) << "\n"
            << "b = " << io::format_number(p.b) << "\n"
            << "inflection t* = a/b = " << io::format_number(p.inflection_time()) << "\n"
            << "R² (logit scale) = " << io::format_number(fit.r2_logit) << "\n";
        if (fit.k_at_bound) {
          out << "note: K sits at the edge of its search interval [" << io::format_number(fit.k_lower)
              << ", " << io::format_number(fit.k_upper) << "]; saturation level is not identified\n";
        }
      }
      return ok;
    }

    if (forecast->parsed()) {
      const auto series = detail::load(input_path, Role::host, aggregator, err).parsed;
      const double last = series.observations().back().t;
      if (!(forecast_to >= last)) {
        fail(ErrorCode::invalid_input, "forecast: --to must not precede the last observation (" +
                                           io::format_number(last) + ")");
      }
      const auto fit = parasitech::fit_logistic(series, k_max_factor);
      std::vector<double> horizon;
      for (std::size_t i = 0;; ++i) {
        const double t = last + forecast_step * static_cast<double>(i);
        if (t > forecast_to + 1e-9 * std::max(1.0, std::fabs(forecast_to))) break;
        horizon.push_back(t);
      }
      out << "t,value\n";
      for (const auto& tv : forecast_series(fit, horizon)) {
        out << io::format_number(tv.t) << "," << io::format_number(tv.value) << "\n";
      }
      return ok;
    }

    if (correlate->parsed()) {
      std::vector<TechSeries> series;
      for (const auto& p : series_paths) series.push_back(detail::load(p, Role::parasite, aggregator, err).parsed);
      AnalysisReport report;
      report.correlations = correlation_matrix(series);
      report.provenance.input_files.clear();
      for (const auto& p : series_paths) report.provenance.input_files.push_back(detail::basename(p));
      report.provenance.settings = {{"command", "correlate"}, {"aggregator", aggregator}};
      if (format == "csv") out << detail::correlations_csv(report.correlations);
      else out << io::render_report(report, io::parse_format(format));
      return ok;
    }

    if (classify->parsed()) {
      if (se_value.has_value() != n_value.has_value()) {
        throw UsageError("classify: --se and --n must be given together");
      }
      const auto c = se_value ? classify_with_test(b_value, *se_value, *n_value, alpha)
                              : classify_point(b_value);
      out << "B = " << io::format_number(c.b_estimate) << "\n"
          << "grade " << c.grade << "\n"
          << "mode: " << to_string(c.mode) << "\n"
          << "evolution: " << to_string(c.label) << " (" << c.symbol << ")\n"
          << "prediction: " << c.prediction << "\n";
      if (c.test) {
        out << "test of B = 1: t = " << io::fixed(c.test->t_stat, 4) << ", df = " << c.test->df
            << ", p = " << io::format_number(c.test->p_value, 6) << ", alpha = " << io::format_number(c.test->alpha)
            << "\n";
      } else {
        out << "test of B = 1: none (exact comparison, tolerance 1e-9)\n";
      }
      if (c.negative_b) err << "warning: negative B is outside the scale; graded as parasitism\n";
      return ok;
    }

    if (simulate->parsed()) {
      sim::SimConfig config;
      config.host = LogisticParams::from_midpoint(k1, b1, t1);
      config.parasites = {LogisticParams::from_midpoint(k2, b2, t2)};
      config.t_start = t_start;
      config.t_end = t_end;
      config.n_points = n_points;
      config.noise_sigma = noise;
      config.missing_prob = missing;
      config.seed = seed ? *seed : detail::default_seed();
      const auto system = sim::simulate_pair(config);
      const auto host = system.host.renamed("host", Role::host);
      const auto parasite = system.parasites.front().renamed("parasite", Role::parasite);
      const std::string host_file = out_prefix + "host.csv";
      const std::string parasite_file = out_prefix + "parasite.csv";
      io::write_file(host_file, io::write_series_csv(host));
      io::write_file(parasite_file, io::write_series_csv(parasite));
      out << host_file << "\n" << parasite_file << "\n";
      return ok;
    }

    if (recover->parsed()) {
      auto config = detail::load_sim_config(config_path);
      if (seed) config.seed = *seed;
      sim::RecoveryOptions options;
      options.early_phase_only = early_phase;
      options.early_threshold = early_threshold;
      const auto s = sim::monte_carlo_recovery(config, replicates, options);
      if (format == "json") {
        nlohmann::ordered_json j;
        j["replicates"] = s.replicates;
        j["true_B"] = io::detail::num(s.true_B);
        j["fits"] = s.estimates.size();
        j["failures"] = s.failures;
        j["perfect_fits"] = s.perfect_fits;
        j["bias"] = io::detail::num(s.bias);
        j["rmse"] = io::detail::num(s.rmse);
        j["coverage_95"] = io::detail::num(s.coverage_95);
        j["window"] = {io::detail::num(s.window_start), io::detail::num(s.window_end)};
        j["early_phase"] = early_phase;
        j["seed"] = config.seed;
        j["estimates"] = io::detail::nums(s.estimates);
        out << j.dump(2) << "\n";
      } else {
        out << "replicates: " << s.replicates << " (fits " << s.estimates.size() << ", failures "
            << s.failures << ", perfect fits " << s.perfect_fits << ")\n"
            << "true B = b2/b1: " << io::format_number(s.true_B) << "\n"
            << "mean estimate: " << io::format_number(s.true_B + s.bias) << "\n"
            << "bias: " << io::format_number(s.bias) << "\n"
            << "rmse: " << io::format_number(s.rmse) << "\n"
            << "95% CI coverage: " << (s.coverage_95 ? io::format_number(*s.coverage_95) : "n/a (perfect fits)")
            << "\n"
            << "sampling window: [" << io::format_number(s.window_start) << ", "
            << io::format_number(s.window_end) << "]\n";
      }
      return ok;
    }

    if (stats->parsed()) {
      const auto series = detail::load(input_path, Role::host, aggregator, err).parsed;
      const auto values = log_scale ? series.log_values() : series.values();
      const auto d = stat::descriptive(values);
      if (format == "json") {
        nlohmann::ordered_json j;
        j["series"] = series.name();
        j["scale"] = log_scale ? "log" : "raw";
        j["n"] = d.n;
        j["mean"] = io::detail::num(d.mean);
        j["sd"] = io::detail::num(d.sd);
        j["skewness"] = io::detail::num(d.skewness);
        j["kurtosis"] = io::detail::num(d.kurtosis);
        out << j.dump(2) << "\n";
      } else {
        out << "series: " << series.name() << (log_scale ? " (log scale)" : "") << "\n"
            << "n: " << d.n << "\n"
            << "mean: " << io::format_number(d.mean) << "\n"
            << "sd: " << io::format_number(d.sd) << "\n"
            << "skewness: " << (d.skewness ? io::format_number(*d.skewness) : "undefined") << "\n"
            << "kurtosis: " << (d.kurtosis ? io::format_number(*d.kurtosis) : "undefined") << "\n";
      }
      return ok;
    }

    if (standardize->parsed()) {
      const auto series = detail::load(input_path, Role::host, aggregator, err).parsed;
      const auto z = stat::zscore(series.values());
      const auto t = series.times();
      out << "t,z\n";
      for (std::size_t i = 0; i < z.size(); ++i) {
        out << io::format_number(t[i]) << "," << io::format_number(z[i]) << "\n";
      }
      return ok;
    }
  } catch (const UsageError& e) {
    err << "error[usage]: " << e.what() << "\n";
    return usage_error;
  } catch (const Error& e) {
    err << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << "\n";
    return data_error;
  }
  err << "error[usage]: no subcommand\n";
  return usage_error;
}

}  // namespace parasitech::cli
