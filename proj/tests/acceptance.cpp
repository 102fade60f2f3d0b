// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   parasitech_acceptance --cli <path to parasitech> --golden <json> --workdir <dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "golden_args.hpp"
#include "oracles.hpp"
#include "parasitech/parasitech.hpp"

namespace fs = std::filesystem;
using namespace parasitech;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Args {
  std::string cli;
  std::string golden;
  std::string workdir;
};

// Shared failure counter for the sub-checks of one criterion.
struct Tally {
  int failures = 0;
  std::string first;
  void check(bool ok, const std::string& what) {
    if (ok) return;
    if (failures++ == 0) first = what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures == 0) return {true, summary};
    return {false, std::to_string(failures) + " failures, first: " + first};
  }
};

std::string g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// 1. Reference coefficients graded by the point rule.
Outcome reference_classification() {
  Tally t;
  for (double b : {1.74, 1.89, 1.19}) {
    const auto c = classify_point(b);
    t.check(c.grade == 3 && c.label == EvolutionLabel::development, "B=" + g(b) + " not development");
  }
  for (double b : {0.23, 0.35}) {
    const auto c = classify_point(b);
    t.check(c.grade == 1 && c.label == EvolutionLabel::underdevelopment, "B=" + g(b) + " not underdevelopment");
  }
  return t.outcome("5/5 coefficients graded as expected");
}

// 2. Estimator recovery on simulated early-phase logistics.
Outcome estimator_recovery() {
  sim::SimConfig c;
  c.host = LogisticParams::from_midpoint(100.0, 0.05, 2060.0);
  c.parasites = {LogisticParams::from_midpoint(100.0, 0.087, 2025.0)};
  c.t_start = 1920.0;
  c.t_end = 1963.0;
  c.n_points = 44;
  c.noise_sigma = 0.03;
  c.seed = 20240101;
  const auto s = sim::monte_carlo_recovery(c, 200);
  const double mean_b = s.true_B + s.bias;
  const bool bias_ok = std::fabs(mean_b - 1.74) < 0.05;
  const bool cov_ok = s.coverage_95 && *s.coverage_95 >= 0.90 && *s.coverage_95 <= 0.99;
  const std::string d = "mean(B^)=" + g(mean_b) + " coverage=" + (s.coverage_95 ? g(*s.coverage_95) : "n/a") +
                        " fits=" + std::to_string(s.estimates.size()) + "/200";
  return {bias_ok && cov_ok && s.estimates.size() == 200, d};
}

// 3. Closed-form power law against numerical elimination of time.
Outcome power_law_identity() {
  Tally t;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> kd(1.0, 1e3), bd(0.02, 0.3), td(1900.0, 2100.0);
  double worst_slope = 0.0, worst_icpt = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double k1 = kd(rng), b1 = bd(rng), t1 = td(rng);
    const double k2 = kd(rng), b2 = bd(rng), t2 = td(rng);
    const auto law = derive_power_law(LogisticParams::from_midpoint(k1, b1, t1),
                                      LogisticParams::from_midpoint(k2, b2, t2));
    const auto num = oracle::eliminate_time({k1, b1 * t1, b1}, {k2, b2 * t2, b2}, 1e-6);
    const double ds = std::fabs(num.slope - law.B);
    const double di = std::fabs(num.intercept - std::log(law.A));
    worst_slope = std::max(worst_slope, ds);
    worst_icpt = std::max(worst_icpt, di);
    t.check(ds < 1e-4, "draw " + std::to_string(i) + " slope off by " + g(ds));
    t.check(di < 1e-3, "draw " + std::to_string(i) + " intercept off by " + g(di));
  }
  return t.outcome("100 draws, max |dB|=" + g(worst_slope) + " max |dlogA|=" + g(worst_icpt));
}

// 4. OLS against the sum-formula and normal-equation oracles.
Outcome ols_oracles() {
  Tally t;
  std::mt19937_64 rng(404);
  std::normal_distribution<double> nd;
  double worst_simple = 0.0, worst_multi = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    std::uniform_int_distribution<int> nn(5, 50);
    const auto n = static_cast<std::size_t>(nn(rng));
    const auto x = oracle::uniform_vector(rng, n, -10.0, 10.0);
    std::vector<double> y;
    for (double xi : x) y.push_back(2.0 - 0.3 * xi + nd(rng));
    const auto r = stat::ols_simple(x, y);
    const auto o = oracle::simple_regression(x, y);
    const double d = std::max(std::fabs(r.coefficients[0] - o.intercept), std::fabs(r.coefficients[1] - o.slope));
    worst_simple = std::max(worst_simple, d);
    t.check(d <= 1e-10, "simple instance " + std::to_string(rep) + " off by " + g(d));
  }
  for (int rep = 0; rep < 50; ++rep) {
    std::uniform_int_distribution<int> kk(1, 6);
    const auto k = static_cast<std::size_t>(kk(rng));
    std::uniform_int_distribution<int> nn(static_cast<int>(k) + 3, 50);
    const auto n = static_cast<std::size_t>(nn(rng));
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < k; ++j) cols.push_back(oracle::uniform_vector(rng, n, -3.0, 3.0));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = nd(rng);
      for (std::size_t j = 0; j < k; ++j) y[i] += (1.0 - 0.4 * static_cast<double>(j)) * cols[j][i];
    }
    const auto r = stat::ols_multi(cols, y);
    const auto o = oracle::normal_equations(cols, y);
    for (std::size_t j = 0; j <= k; ++j) {
      const double d = std::max(std::fabs(r.coefficients[j] - o.beta[j]), std::fabs(r.standard_errors[j] - o.se[j]));
      worst_multi = std::max(worst_multi, d);
      t.check(d <= 1e-8, "multi instance " + std::to_string(rep) + " off by " + g(d));
    }
  }
  return t.outcome("simple max diff " + g(worst_simple) + ", multi max diff " + g(worst_multi));
}

// 5. Distribution kernels.
Outcome distribution_kernels() {
  Tally t;
  for (double x : {0.05, 0.3, 1.0, 2.5, 7.0, 40.0, 300.0}) {
    t.check(std::fabs(stat::student_t_sf(x, 1.0) - oracle::t_two_sided_df1(x)) <= 1e-10, "df=1 at t=" + g(x));
    t.check(std::fabs(stat::student_t_sf(x, 2.0) - oracle::t_two_sided_df2(x)) <= 1e-10, "df=2 at t=" + g(x));
  }
  for (double x : {0.2, 1.0, 1.96, 2.8, 3.5}) {
    t.check(std::fabs(stat::student_t_sf(x, 1000.0) - oracle::normal_two_sided(x)) <= 1e-3,
            "df=1000 at t=" + g(x));
  }
  for (double nu : {1.0, 3.0, 10.0, 42.0, 250.0}) {
    for (double x : {0.1, 0.9, 2.0, 4.5}) {
      t.check(std::fabs(stat::f_sf(x * x, 1.0, nu) - stat::student_t_sf(x, nu)) <= 1e-10,
              "F(t^2,1," + g(nu) + ") at t=" + g(x));
    }
  }
  return t.outcome("closed forms, normal limit and F/t identity hold");
}

// 6. Invariance properties over random cases.
Outcome invariance_suite() {
  Tally t;
  std::mt19937_64 rng(606);
  std::normal_distribution<double> nd(0.0, 0.05);
  std::uniform_real_distribution<double> scale(1e-3, 1e3), shift(-1e3, 1e3), bd(0.1, 3.0);
  constexpr int cases = 100;

  for (int i = 0; i < cases; ++i) {
    const double B = bd(rng);
    std::vector<Observation> h, p;
    for (int k = 0; k < 25; ++k) {
      const double hv = std::exp(0.06 * k + nd(rng));
      h.push_back({2000.0 + k, hv});
      p.push_back({2000.0 + k, 0.7 * std::pow(hv, B) * std::exp(nd(rng))});
    }
    const TechSeries hs("h", Role::host, "", h), ps("p", Role::parasite, "", p);
    const auto base = fit_evolution(hs, ps);
    const auto sc = fit_evolution(hs.rescaled(scale(rng)), ps.rescaled(scale(rng)));
    t.check(std::fabs(sc.B - base.B) <= 1e-10 * std::max(1.0, std::fabs(base.B)), "scale changed B");
    t.check(sc.classification.grade == base.classification.grade, "scale changed grade");
  }

  for (int i = 0; i < cases; ++i) {
    const auto v = oracle::uniform_vector(rng, 15, -5.0, 5.0);
    const double a = scale(rng), c = shift(rng);
    std::vector<double> w;
    for (double x : v) w.push_back(a * x + c);
    const auto zv = stat::zscore(v), zw = stat::zscore(w);
    for (std::size_t k = 0; k < v.size(); ++k) t.check(std::fabs(zv[k] - zw[k]) <= 1e-9, "z-score not affine invariant");
  }

  std::uniform_real_distribution<double> kd(0.1, 1e4), ad(-50.0, 50.0), rd(0.01, 2.0), dd(0.0, 20.0);
  for (int i = 0; i < cases; ++i) {
    const LogisticParams p(kd(rng), ad(rng), rd(rng));
    const double d = dd(rng) / p.b;
    const double ts = p.inflection_time();
    const double sum = logistic_value(p, ts + d) + logistic_value(p, ts - d);
    t.check(std::fabs(sum - p.K) <= 1e-9 * p.K, "logistic not symmetric about a/b");
  }

  for (int i = 0; i < cases; ++i) {
    const auto x = oracle::uniform_vector(rng, 12, 0.0, 1.0);
    const auto y = oracle::uniform_vector(rng, 12, 0.0, 1.0);
    const double a = scale(rng) * (i % 2 ? -1.0 : 1.0), c = scale(rng);
    const double bx = shift(rng), by = shift(rng);
    std::vector<double> x2, y2;
    for (double v : x) x2.push_back(a * v + bx);
    for (double v : y) y2.push_back(c * v + by);
    const double r = *stat::pearson(std::span<const double>(x), std::span<const double>(y)).r;
    const double r2 = *stat::pearson(std::span<const double>(x2), std::span<const double>(y2)).r;
    t.check(std::fabs(r2 - (a > 0 ? r : -r)) <= 1e-10, "Pearson not affine invariant");
  }
  return t.outcome("4 properties x " + std::to_string(cases) + " cases, 0 failures");
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

int shell(const std::string& cli, const std::vector<std::string>& args, const fs::path& stdout_file) {
  std::string cmd = quote(cli);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " > " + quote(stdout_file.string()) + " 2>/dev/null";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 7. simulate -> evolve --format json against the frozen golden file.
Outcome golden_pipeline(const Args& args) {
  const fs::path dir = args.workdir;
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string prefix = (dir / "sim_").string();
  if (shell(args.cli, golden::simulate_args(prefix), dir / "simulate.out") != 0) return {false, "simulate failed"};
  if (shell(args.cli, golden::evolve_args(prefix), dir / "evolve.json") != 0) return {false, "evolve failed"};
  const auto produced = slurp(dir / "evolve.json");
  const auto expected = slurp(args.golden);
  if (expected.empty()) return {false, "golden file missing or empty: " + args.golden};
  if (produced != expected) return {false, "output differs from " + args.golden};
  return {true, std::to_string(produced.size()) + " bytes identical"};
}

}  // namespace

int main(int argc, char** argv) {
  Args args;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string key = argv[i];
    if (key == "--cli") args.cli = argv[i + 1];
    else if (key == "--golden") args.golden = argv[i + 1];
    else if (key == "--workdir") args.workdir = argv[i + 1];
    else {
      std::cerr << "unknown argument " << key << "\n";
      return 2;
    }
  }
  if (args.cli.empty() || args.golden.empty() || args.workdir.empty()) {
    std::cerr << "usage: parasitech_acceptance --cli PATH --golden PATH --workdir DIR\n";
    return 2;
  }

  struct Criterion {
    int id;
    std::string name;
    double budget_s;  // runtime limit; 0 means none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "reference-coefficient classification", 1.0, reference_classification},
      {2, "estimator recovery (200 replicates)", 10.0, estimator_recovery},
      {3, "power-law identity vs time elimination", 5.0, power_law_identity},
      {4, "OLS oracle equivalence", 5.0, ols_oracles},
      {5, "distribution kernels", 0.0, distribution_kernels},
      {6, "invariance suite", 0.0, invariance_suite},
      {7, "end-to-end golden output", 1.0, [&] { return golden_pipeline(args); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += " (over the " + g(c.budget_s) + " s budget)";
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] criterion %d: %s (%.3f s) %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
