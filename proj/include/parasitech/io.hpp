#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "parasitech/classify.hpp"
#include "parasitech/distributions.hpp"
#include "parasitech/error.hpp"
#include "parasitech/evolution.hpp"
#include "parasitech/series.hpp"

namespace parasitech::io {

inline constexpr const char* tool_version = "1.0.0";

enum class Aggregator { mean, median, max };
enum class ReportFormat { text, json, csv };

inline Aggregator parse_aggregator(std::string_view s) {
  if (s == "mean") return Aggregator::mean;
  if (s == "median") return Aggregator::median;
  if (s == "max") return Aggregator::max;
  fail(ErrorCode::invalid_input, "unknown aggregator '" + std::string(s) + "'");
}

inline ReportFormat parse_format(std::string_view s) {
  if (s == "text") return ReportFormat::text;
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  fail(ErrorCode::invalid_input, "unknown report format '" + std::string(s) + "'");
}

inline const char* to_string(Aggregator a) {
  switch (a) {
    case Aggregator::mean: return "mean";
    case Aggregator::median: return "median";
    case Aggregator::max: return "max";
  }
  return "";
}

/// %.{digits}g; 12 significant digits unless asked otherwise.
inline std::string format_number(double x, int digits = 12) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

inline std::string fixed(double x, int decimals) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

struct SeriesFile {
  std::string path;
  TechSeries parsed;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && !s.empty();
}

inline bool is_missing(std::string_view s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan";
}

inline double aggregate(std::vector<double> v, Aggregator agg) {
  switch (agg) {
    case Aggregator::max: return *std::max_element(v.begin(), v.end());
    case Aggregator::median: {
      std::sort(v.begin(), v.end());
      const std::size_t m = v.size() / 2;
      return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    }
    case Aggregator::mean:
    default: {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    }
  }
}

inline std::string line_ref(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

}  // namespace detail

/// Parses `t,value` CSV text. `#` lines are comments; `# name:` and
/// `# units:` comments fill in a missing name or units. Duplicate times are
/// collapsed with `agg`; non-positive values are dropped with a warning.
inline SeriesFile parse_series_csv_text(std::string_view text, const std::string& source,
                                        std::string name, Role role, std::string units,
                                        Aggregator agg = Aggregator::mean) {
  std::vector<std::string> warnings;
  std::map<double, std::vector<double>> rows;
  std::map<double, std::size_t> first_line;
  bool header_seen = false;
  std::string comment_name;
  std::string comment_units;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = detail::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = detail::trim(line.substr(1));
      if (body.starts_with("name:")) comment_name = std::string(detail::trim(body.substr(5)));
      if (body.starts_with("units:")) comment_units = std::string(detail::trim(body.substr(6)));
      continue;
    }
    const auto comma = line.find(',');
    if (!header_seen) {
      if (comma == std::string_view::npos || detail::trim(line.substr(0, comma)) != "t" ||
          detail::trim(line.substr(comma + 1)) != "value") {
        fail(ErrorCode::format, detail::line_ref(source, line_no) + ": expected header 't,value'");
      }
      header_seen = true;
      continue;
    }
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      fail(ErrorCode::format, detail::line_ref(source, line_no) + ": expected exactly two fields");
    }
    const auto t_cell = detail::trim(line.substr(0, comma));
    const auto v_cell = detail::trim(line.substr(comma + 1));
    double t = 0.0;
    if (!detail::parse_double(t_cell, t) || !std::isfinite(t)) {
      fail(ErrorCode::format, detail::line_ref(source, line_no) + ": non-numeric time '" +
                                  std::string(t_cell) + "'");
    }
    if (detail::is_missing(v_cell)) {
      warnings.push_back("line " + std::to_string(line_no) + ": missing value skipped");
      continue;
    }
    double v = 0.0;
    if (!detail::parse_double(v_cell, v)) {
      fail(ErrorCode::format, detail::line_ref(source, line_no) + ": non-numeric value '" +
                                  std::string(v_cell) + "'");
    }
    if (!std::isfinite(v) || v <= 0.0) {
      warnings.push_back("line " + std::to_string(line_no) + ": non-positive value " +
                         std::string(v_cell) + " rejected");
      continue;
    }
    rows[t].push_back(v);
    first_line.emplace(t, line_no);
  }
  if (!header_seen) fail(ErrorCode::format, source + ": missing header 't,value'");
  if (rows.empty()) fail(ErrorCode::empty_series, source + ": no valid observations");

  std::vector<Observation> obs;
  for (auto& [t, vs] : rows) {
    if (vs.size() > 1) {
      warnings.push_back("t=" + format_number(t) + ": " + std::to_string(vs.size()) +
                         " rows aggregated by " + to_string(agg));
    }
    obs.push_back({t, detail::aggregate(vs, agg)});
  }
  if (name.empty()) name = comment_name;
  if (units.empty()) units = comment_units;
  return SeriesFile{source, TechSeries(std::move(name), role, std::move(units), std::move(obs)),
                    std::move(warnings)};
}

/// Reads a series file; an empty `name` falls back to the `# name:` comment
/// and then to the file stem.
inline SeriesFile parse_series_csv(const std::filesystem::path& path, std::string name, Role role,
                                   std::string units = "", Aggregator agg = Aggregator::mean) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto file = parse_series_csv_text(buf.str(), path.string(), std::move(name), role, std::move(units), agg);
  if (file.parsed.name().empty()) {
    file.parsed = file.parsed.renamed(path.stem().string(), role);
  }
  return file;
}

inline std::string write_series_csv(const TechSeries& series, int digits = 12) {
  std::string out;
  if (!series.name().empty()) out += "# name: " + series.name() + "\n";
  if (!series.units().empty()) out += "# units: " + series.units() + "\n";
  out += "t,value\n";
  for (const auto& o : series.observations()) {
    out += format_number(o.t, digits) + "," + format_number(o.value, digits) + "\n";
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << contents;
  if (!out) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Report rendering

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(format_number(x).c_str(), nullptr);
}

inline ojson num(const std::optional<double>& x) { return x ? num(*x) : ojson(nullptr); }

inline ojson nums(const std::vector<double>& v) {
  ojson a = ojson::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline ojson regression_json(const stat::RegressionResult& r) {
  ojson j;
  j["coefficients"] = nums(r.coefficients);
  j["standard_errors"] = nums(r.standard_errors);
  j["t_stats"] = nums(r.t_stats);
  j["p_values"] = nums(r.p_values);
  ojson sc = ojson::array();
  for (const auto& s : r.standardized_coefficients) sc.push_back(num(s));
  j["standardized_coefficients"] = sc;
  j["r2"] = num(r.r2);
  j["r2_adj"] = num(r.r2_adj);
  j["f_stat"] = num(r.f_stat);
  j["f_p"] = num(r.f_p);
  j["residual_se"] = num(r.residual_se);
  j["n"] = r.n;
  j["k"] = r.k;
  j["df_residual"] = r.df_residual();
  j["perfect_fit"] = r.perfect_fit;
  j["residuals"] = nums(r.residuals);
  j["fitted"] = nums(r.fitted);
  return j;
}

inline ojson classification_json(const EvolutionClass& c) {
  ojson j;
  j["grade"] = c.grade;
  j["mode"] = std::string(to_string(c.mode));
  j["evolution"] = std::string(to_string(c.label));
  j["symbol"] = std::string(c.symbol);
  j["prediction"] = std::string(c.prediction);
  j["b_estimate"] = num(c.b_estimate);
  j["negative_b"] = c.negative_b;
  if (c.test) {
    j["test"] = {{"null_B", 1},
                 {"t_stat", num(c.test->t_stat)},
                 {"p_value", num(c.test->p_value)},
                 {"alpha", num(c.test->alpha)},
                 {"df", num(c.test->df)}};
  } else {
    j["test"] = nullptr;
  }
  return j;
}

inline ojson report_json(const AnalysisReport& report) {
  ojson root;
  ojson meta;
  meta["tool"] = "parasitech";
  meta["version"] = tool_version;
  meta["log_base"] = "e";
  meta["timestamp"] = report.provenance.timestamp ? ojson(*report.provenance.timestamp) : ojson(nullptr);
  meta["inputs"] = report.provenance.input_files;
  ojson settings = ojson::object();
  for (const auto& [k, v] : report.provenance.settings) settings[k] = v;
  meta["settings"] = settings;
  meta["alpha"] = num(report.provenance.alpha);
  meta["warnings"] = report.warnings;
  root["meta"] = meta;

  ojson fits = ojson::array();
  for (const auto& f : report.fits) {
    ojson j;
    j["host"] = f.host_name;
    j["parasite"] = f.parasite_name;
    j["n_paired"] = f.n_paired;
    j["years_used"] = nums(f.years_used);
    j["log_A"] = num(f.log_A);
    j["A"] = num(std::exp(f.log_A));
    j["B"] = num(f.B);
    j["B_stars"] = stat::significance_stars(f.regression.p_values[1]);
    j["regression"] = regression_json(f.regression);
    j["classification"] = classification_json(f.classification);
    fits.push_back(j);
  }
  root["fits"] = fits;

  ojson multi = ojson::array();
  for (const auto& f : report.multi_fits) {
    ojson j;
    j["target"] = f.target_parasite;
    j["predictors"] = f.predictor_names;
    j["n_listwise"] = f.n_listwise;
    j["years_used"] = nums(f.years_used);
    j["dominant_predictors"] = f.dominant_predictors;
    j["significant_predictors"] = f.significant_predictors;
    j["alpha"] = num(f.alpha);
    j["regression"] = regression_json(f.regression);
    multi.push_back(j);
  }
  root["multi_fits"] = multi;

  ojson corr;
  corr["names"] = report.correlations.names;
  ojson cells = ojson::array();
  for (const auto& row : report.correlations.cells) {
    ojson r = ojson::array();
    for (const auto& c : row) r.push_back({{"r", num(c.r)}, {"p", num(c.p)}, {"n", c.n}});
    cells.push_back(r);
  }
  corr["cells"] = cells;
  root["correlations"] = corr;

  ojson desc = ojson::array();
  for (const auto& d : report.descriptives) {
    desc.push_back({{"name", d.name},
                    {"role", to_string(d.role)},
                    {"units", d.units},
                    {"scale", "log"},
                    {"n", d.stats.n},
                    {"mean", num(d.stats.mean)},
                    {"sd", num(d.stats.sd)},
                    {"skewness", num(d.stats.skewness)},
                    {"kurtosis", num(d.stats.kurtosis)}});
  }
  root["descriptives"] = desc;

  ojson traj = ojson::array();
  for (const auto& t : report.standardized_trajectories) {
    traj.push_back({{"name", t.name}, {"t", nums(t.t)}, {"z", nums(t.z)}});
  }
  root["standardized_trajectories"] = traj;
  return root;
}

inline std::string coef_cell(double coef, double se, double p) {
  return fixed(coef, 2) + stat::significance_stars(p) + " (" + fixed(se, 2) + ")";
}

inline std::string p_cell(double p) {
  if (std::isnan(p)) return "n/a";
  return p < 0.001 ? "<0.001" : fixed(p, 3);
}

inline std::string pad(std::string s, std::size_t w) {
  // Display width, counting UTF-8 continuation bytes as part of one glyph.
  std::size_t glyphs = 0;
  for (unsigned char c : s) glyphs += (c & 0xC0) != 0x80;
  if (glyphs < w) s.append(w - glyphs, ' ');
  return s;
}

inline std::string years_span(const std::vector<double>& years) {
  if (years.empty()) return "-";
  return format_number(years.front()) + "-" + format_number(years.back());
}

inline std::string report_text(const AnalysisReport& report) {
  std::ostringstream os;
  os << "Host-parasite technology evolution report\n";
  os << "Logarithms are natural (base e). Significance: *** p<.001, ** p<.01, * p<.05\n";

  std::size_t idx = 0;
  for (const auto& f : report.fits) {
    const auto& r = f.regression;
    os << "\nFit " << ++idx << ": log " << f.parasite_name << " = log A + B log " << f.host_name << "\n";
    os << "  " << pad("Years", 40) << years_span(f.years_used) << " (n = " << f.n_paired << ")\n";
    os << "  " << pad("Constant α (St. Err.)", 40)
       << coef_cell(r.coefficients[0], r.standard_errors[0], r.p_values[0]) << "\n";
    os << "  " << pad("Evolutionary coefficient β=B (St. Err.)", 40)
       << coef_cell(r.coefficients[1], r.standard_errors[1], r.p_values[1]) << "\n";
    os << "  " << pad("R² adj. (St. Err. of the Estimate)", 40) << fixed(r.r2_adj, 2) << " ("
       << fixed(r.residual_se, 2) << ")\n";
    os << "  " << pad("F (sign.)", 40) << fixed(r.f_stat, 2) << " (" << p_cell(r.f_p) << ")\n";
    const auto& c = f.classification;
    os << "  Classification: grade " << c.grade << ", " << to_string(c.mode) << ", "
       << to_string(c.label) << " (" << c.symbol << ")\n";
    os << "  Prediction: " << c.prediction << "\n";
    if (c.test) {
      os << "  Test of B = 1: t = " << fixed(c.test->t_stat, 3) << ", df = " << c.test->df
         << ", p = " << p_cell(c.test->p_value) << ", alpha = " << format_number(c.test->alpha) << "\n";
    } else {
      os << "  Test of B = 1: not applicable (zero residual variance), graded by direct comparison\n";
    }
  }

  idx = 0;
  for (const auto& f : report.multi_fits) {
    const auto& r = f.regression;
    os << "\nMultidimensional fit " << ++idx << ": dependent variable log " << f.target_parasite << "\n";
    os << "  Years " << years_span(f.years_used) << " (listwise n = " << f.n_listwise << ")\n";
    os << "  " << pad("", 32) << pad("Unstandardized (St. Err.)", 28) << pad("Standardized", 14)
       << "t-test\n";
    os << "  " << pad("Constant α", 32) << pad(coef_cell(r.coefficients[0], r.standard_errors[0], r.p_values[0]), 28)
       << pad("", 14) << fixed(r.t_stats[0], 2) << "\n";
    for (std::size_t j = 0; j < f.predictor_names.size(); ++j) {
      const auto& sc = r.standardized_coefficients[j + 1];
      os << "  " << pad("log " + f.predictor_names[j], 32)
         << pad(coef_cell(r.coefficients[j + 1], r.standard_errors[j + 1], r.p_values[j + 1]), 28)
         << pad(sc ? fixed(*sc, 2) : "n/a", 14) << fixed(r.t_stats[j + 1], 2) << "\n";
    }
    os << "  " << pad("R² adj. (St. Err. of the Estimate)", 40) << fixed(r.r2_adj, 2) << " ("
       << fixed(r.residual_se, 2) << ")\n";
    os << "  " << pad("F (sign.)", 40) << fixed(r.f_stat, 2) << " (" << p_cell(r.f_p) << ")\n";
    os << "  Dominant predictors:";
    for (const auto& n : f.dominant_predictors) os << " " << n;
    os << "\n";
  }

  if (!report.correlations.empty()) {
    const auto& m = report.correlations;
    os << "\nPearson correlations of log values (pairwise deletion)\n";
    os << "  " << pad("", 20);
    for (const auto& n : m.names) os << pad(n, 16);
    os << "\n";
    for (std::size_t i = 0; i < m.names.size(); ++i) {
      std::string r_line = "  " + pad(m.names[i] + " r", 20);
      std::string p_line = "  " + pad("  sig. (2-tailed)", 20);
      std::string n_line = "  " + pad("  N", 20);
      for (const auto& c : m.cells[i]) {
        r_line += pad(c.r ? fixed(*c.r, 3) + (c.p ? stat::significance_stars(*c.p) : "") : "n/a", 16);
        p_line += pad(c.p ? fixed(*c.p, 3) : "n/a", 16);
        n_line += pad(std::to_string(c.n), 16);
      }
      os << r_line << "\n" << p_line << "\n" << n_line << "\n";
    }
  }

  if (!report.descriptives.empty()) {
    os << "\nDescriptive statistics in log scale\n";
    os << "  " << pad("", 20) << pad("N", 8) << pad("Mean", 10) << pad("Std. Dev.", 11)
       << pad("Skewness", 10) << "Kurtosis\n";
    for (const auto& d : report.descriptives) {
      os << "  " << pad(d.name, 20) << pad(std::to_string(d.stats.n), 8) << pad(fixed(d.stats.mean, 2), 10)
         << pad(fixed(d.stats.sd, 2), 11) << pad(d.stats.skewness ? fixed(*d.stats.skewness, 2) : "n/a", 10)
         << (d.stats.kurtosis ? fixed(*d.stats.kurtosis, 2) : "n/a") << "\n";
    }
  }

  if (!report.warnings.empty()) {
    os << "\nWarnings\n";
    for (const auto& w : report.warnings) os << "  - " << w << "\n";
  }
  return os.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string joined(const std::vector<std::string>& v, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

inline std::string report_csv(const AnalysisReport& report) {
  std::string out =
      "kind,target,predictors,n,constant,constant_se,coefficient,coefficient_se,coefficient_p,"
      "r2,r2_adj,residual_se,f_stat,f_p,grade,mode,evolution,symbol\n";
  for (const auto& f : report.fits) {
    const auto& r = f.regression;
    const auto& c = f.classification;
    std::vector<std::string> row{"simple",
                                 csv_field(f.parasite_name),
                                 csv_field(f.host_name),
                                 std::to_string(f.n_paired),
                                 format_number(r.coefficients[0]),
                                 format_number(r.standard_errors[0]),
                                 format_number(r.coefficients[1]),
                                 format_number(r.standard_errors[1]),
                                 format_number(r.p_values[1]),
                                 format_number(r.r2),
                                 format_number(r.r2_adj),
                                 format_number(r.residual_se),
                                 format_number(r.f_stat),
                                 format_number(r.f_p),
                                 std::to_string(c.grade),
                                 std::string(to_string(c.mode)),
                                 std::string(to_string(c.label)),
                                 std::string(c.symbol)};
    out += joined(row, ',') + "\n";
  }
  for (const auto& f : report.multi_fits) {
    const auto& r = f.regression;
    std::vector<std::string> coefs;
    std::vector<std::string> ses;
    std::vector<std::string> ps;
    for (std::size_t j = 1; j < r.coefficients.size(); ++j) {
      coefs.push_back(format_number(r.coefficients[j]));
      ses.push_back(format_number(r.standard_errors[j]));
      ps.push_back(format_number(r.p_values[j]));
    }
    std::vector<std::string> row{"multi",
                                 csv_field(f.target_parasite),
                                 csv_field(joined(f.predictor_names)),
                                 std::to_string(f.n_listwise),
                                 format_number(r.coefficients[0]),
                                 format_number(r.standard_errors[0]),
                                 joined(coefs),
                                 joined(ses),
                                 joined(ps),
                                 format_number(r.r2),
                                 format_number(r.r2_adj),
                                 format_number(r.residual_se),
                                 format_number(r.f_stat),
                                 format_number(r.f_p),
                                 "",
                                 "",
                                 "",
                                 ""};
    out += joined(row, ',') + "\n";
  }
  return out;
}

}  // namespace detail

inline std::string render_report(const AnalysisReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return detail::report_json(report).dump(2) + "\n";
    case ReportFormat::csv: return detail::report_csv(report);
    case ReportFormat::text:
    default: return detail::report_text(report);
  }
}

inline std::string file_safe(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "series" : out;
}

/// Writes plot-ready CSVs next to `path_prefix`: one per fit with observed
/// and fitted log values, plus one with every standardized trajectory.
/// Values are written with 17 significant digits so they read back exactly.
inline std::vector<std::filesystem::path> emit_plot_data(const AnalysisReport& report,
                                                         const std::string& path_prefix) {
  if (report.fits.empty() && report.multi_fits.empty()) {
    fail(ErrorCode::invalid_input, "emit_plot_data: report has no fits");
  }
  constexpr int digits = 17;
  std::vector<std::filesystem::path> written;

  for (std::size_t i = 0; i < report.fits.size(); ++i) {
    const auto& f = report.fits[i];
    std::string body = "t,log_host,log_parasite,log_parasite_fitted\n";
    for (std::size_t r = 0; r < f.years_used.size(); ++r) {
      const double fitted = f.log_A + f.B * f.log_host[r];
      body += format_number(f.years_used[r], digits) + "," + format_number(f.log_host[r], digits) + "," +
              format_number(f.log_parasite[r], digits) + "," + format_number(fitted, digits) + "\n";
    }
    std::filesystem::path p =
        path_prefix + "fit" + std::to_string(i + 1) + "_" + file_safe(f.parasite_name) + ".csv";
    write_file(p, body);
    written.push_back(p);
  }
  for (std::size_t i = 0; i < report.multi_fits.size(); ++i) {
    const auto& f = report.multi_fits[i];
    std::string body = "t,log_target,log_target_fitted\n";
    for (std::size_t r = 0; r < f.years_used.size(); ++r) {
      body += format_number(f.years_used[r], digits) + "," + format_number(f.log_target[r], digits) + "," +
              format_number(f.regression.fitted[r], digits) + "\n";
    }
    std::filesystem::path p =
        path_prefix + "multi" + std::to_string(i + 1) + "_" + file_safe(f.target_parasite) + ".csv";
    write_file(p, body);
    written.push_back(p);
  }

  std::vector<double> years;
  for (const auto& t : report.standardized_trajectories) years.insert(years.end(), t.t.begin(), t.t.end());
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());
  std::string body = "t";
  for (const auto& t : report.standardized_trajectories) body += "," + detail::csv_field(t.name);
  body += "\n";
  for (double y : years) {
    body += format_number(y, digits);
    for (const auto& t : report.standardized_trajectories) {
      body += ",";
      const auto it = std::lower_bound(t.t.begin(), t.t.end(), y);
      if (it != t.t.end() && *it == y) {
        body += format_number(t.z[static_cast<std::size_t>(it - t.t.begin())], digits);
      }
    }
    body += "\n";
  }
  std::filesystem::path p = path_prefix + "trajectories.csv";
  write_file(p, body);
  written.push_back(p);
  return written;
}

}  // namespace parasitech::io
