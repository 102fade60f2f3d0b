#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "parasitech/evolution.hpp"
#include "parasitech/logistic.hpp"

using namespace parasitech;

namespace {

TechSeries make(std::string name, Role role, const std::vector<double>& t, const std::vector<double>& v) {
  std::vector<Observation> obs;
  for (std::size_t i = 0; i < t.size(); ++i) obs.push_back({t[i], v[i]});
  return TechSeries(std::move(name), role, "", std::move(obs));
}

std::vector<double> years(double from, int n) {
  std::vector<double> y;
  for (int i = 0; i < n; ++i) y.push_back(from + i);
  return y;
}

// Host values with multiplicative noise, parasite = A H^B times independent noise.
std::pair<TechSeries, TechSeries> noisy_pair(double A, double B, double sigma, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, sigma);
  const auto t = years(1950, n);
  std::vector<double> h, p;
  for (int i = 0; i < n; ++i) {
    const double hv = std::exp(0.05 * i + nd(rng));
    h.push_back(hv);
    p.push_back(A * std::pow(hv, B) * std::exp(nd(rng)));
  }
  return {make("host", Role::host, t, h), make("par", Role::parasite, t, p)};
}

}  // namespace

TEST(Align, PairwiseIntersection) {
  const auto h = make("h", Role::host, {2000, 2001, 2002, 2003}, {1, 2, 3, 4});
  const auto p1 = make("p1", Role::parasite, {2001, 2003, 2005}, {5, 6, 7});
  const auto p2 = make("p2", Role::parasite, {1999, 2000, 2001}, {8, 9, 10});
  const auto tables = align_by_year(h, {p1, p2}, AlignMode::pairwise);
  ASSERT_EQ(tables.size(), 2u);
  EXPECT_EQ(tables[0].years, (std::vector<double>{2001, 2003}));
  EXPECT_NEAR(tables[0].log_columns[0][1], std::log(4.0), 1e-15);
  EXPECT_NEAR(tables[0].log_columns[1][1], std::log(6.0), 1e-15);
  EXPECT_EQ(tables[1].years, (std::vector<double>{2000, 2001}));

  const auto lw = align_by_year(h, {p1, p2}, AlignMode::listwise);
  ASSERT_EQ(lw.size(), 1u);
  EXPECT_EQ(lw[0].years, (std::vector<double>{2001}));
  EXPECT_EQ(lw[0].names, (std::vector<std::string>{"h", "p1", "p2"}));
}

TEST(Align, NoOverlapNamesSeries) {
  const auto h = make("host_x", Role::host, {1, 2, 3}, {1, 2, 3});
  const auto p = make("para_y", Role::parasite, {4, 5, 6}, {1, 2, 3});
  try {
    align_by_year(h, {p}, AlignMode::pairwise);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_overlap);
    EXPECT_NE(std::string(e.what()).find("para_y"), std::string::npos);
  }
}

TEST(FitEvolution, ExactPowerLaw) {
  const auto t = years(1980, 10);
  std::vector<double> h, p;
  for (int i = 0; i < 10; ++i) {
    h.push_back(1.0 + 0.7 * i);
    p.push_back(2.0 * std::pow(h.back(), 1.5));
  }
  const auto fit = fit_evolution(make("h", Role::host, t, h), make("p", Role::parasite, t, p));
  EXPECT_NEAR(fit.B, 1.5, 1e-10);
  EXPECT_NEAR(fit.log_A, std::log(2.0), 1e-10);
  EXPECT_EQ(fit.classification.grade, 3);
  EXPECT_TRUE(fit.regression.perfect_fit);
}

TEST(FitEvolution, ProportionalSeriesIsMutualism) {
  const auto t = years(1980, 12);
  std::vector<double> h, p;
  for (int i = 0; i < 12; ++i) {
    h.push_back(std::exp(0.1 * i) + 0.3 * (i % 3));
    p.push_back(4.0 * h.back());
  }
  const auto fit = fit_evolution(make("h", Role::host, t, h), make("p", Role::parasite, t, p));
  EXPECT_NEAR(fit.B, 1.0, 1e-10);
  EXPECT_EQ(fit.classification.grade, 2);
}

TEST(FitEvolution, EarlyPhaseLogisticsRecoverRateRatio) {
  const auto host = LogisticParams::from_midpoint(100.0, 0.05, 2060.0);
  const auto par = LogisticParams::from_midpoint(100.0, 0.087, 2025.0);
  const auto t = years(1920, 44);
  std::vector<double> h, p;
  for (double y : t) {
    h.push_back(logistic_value(host, y));
    p.push_back(logistic_value(par, y));
  }
  const auto fit = fit_evolution(make("h", Role::host, t, h), make("p", Role::parasite, t, p));
  EXPECT_NEAR(fit.B, 1.74, 0.02);
  EXPECT_EQ(fit.classification.grade, 3);
}

TEST(FitEvolution, TooFewSharedYears) {
  const auto h = make("h", Role::host, {1, 2, 3, 4}, {1, 2, 3, 4});
  const auto p = make("p", Role::parasite, {2, 3, 4, 5}, {1, 2, 4, 8});
  try {
    fit_evolution(h, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_data);
  }
}

TEST(FitEvolution, ScaleInvarianceOfB) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> sd(1e-3, 1e3), bd(0.1, 3.0);
  for (int i = 0; i < 100; ++i) {
    auto [h, p] = noisy_pair(1.5, bd(rng), 0.05, 20, rng);
    const auto base = fit_evolution(h, p);
    const double c1 = sd(rng), c2 = sd(rng);
    const auto scaled = fit_evolution(h.rescaled(c1), p.rescaled(c2));
    EXPECT_NEAR(scaled.B, base.B, 1e-10 * std::max(1.0, std::fabs(base.B)));
    EXPECT_NEAR(scaled.regression.standard_errors[1], base.regression.standard_errors[1], 1e-9);
    EXPECT_EQ(scaled.classification.grade, base.classification.grade);
  }
}

TEST(FitEvolution, SwapRolesInvertsBOnExactData) {
  const auto t = years(1990, 8);
  std::vector<double> h, p;
  for (int i = 0; i < 8; ++i) {
    h.push_back(1.0 + i * i);
    p.push_back(3.0 * std::pow(h.back(), 0.6));
  }
  const auto hs = make("h", Role::host, t, h);
  const auto ps = make("p", Role::parasite, t, p);
  const auto f = fit_evolution(hs, ps);
  const auto g = fit_evolution(ps.renamed("p", Role::host), hs.renamed("h", Role::parasite));
  EXPECT_NEAR(f.B * g.B, 1.0, 1e-10);
  EXPECT_EQ(f.classification.grade, 1);
  EXPECT_EQ(g.classification.grade, 3);
}

TEST(FitEvolutionMulti, ExactCombination) {
  const auto t = years(1960, 15);
  std::mt19937_64 rng(52);
  const auto h = oracle::uniform_vector(rng, 15, 1.0, 10.0);
  const auto q = oracle::uniform_vector(rng, 15, 1.0, 10.0);
  std::vector<double> target;
  for (int i = 0; i < 15; ++i) target.push_back(0.5 * std::pow(h[i], 1.2) * std::pow(q[i], -0.4));
  const auto fit = fit_evolution_multi(make("tgt", Role::parasite, t, target), make("h", Role::host, t, h),
                                       {make("q", Role::parasite, t, q)});
  EXPECT_NEAR(fit.regression.coefficients[0], std::log(0.5), 1e-9);
  EXPECT_NEAR(fit.regression.coefficients[1], 1.2, 1e-9);
  EXPECT_NEAR(fit.regression.coefficients[2], -0.4, 1e-9);
  EXPECT_EQ(fit.predictor_names, (std::vector<std::string>{"h", "q"}));
  EXPECT_EQ(fit.n_listwise, 15u);
}

TEST(FitEvolutionMulti, DuplicatePredictorIsCollinear) {
  const auto t = years(1960, 10);
  std::mt19937_64 rng(53);
  const auto h = oracle::uniform_vector(rng, 10, 1.0, 10.0);
  const auto target = oracle::uniform_vector(rng, 10, 1.0, 10.0);
  try {
    fit_evolution_multi(make("tgt", Role::parasite, t, target), make("h", Role::host, t, h),
                        {make("h_copy", Role::parasite, t, h)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::collinearity);
    EXPECT_NE(std::string(e.what()).find("h_copy"), std::string::npos);
  }
}

TEST(FitEvolutionMulti, SixPredictorsWithinThreeStandardErrors) {
  std::mt19937_64 rng(54);
  std::normal_distribution<double> nd(0.0, 0.1);
  const std::vector<double> truth{0.3, 1.1, -0.5, 0.8, 0.0, 0.25, -1.2};
  std::size_t inside = 0, total = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = years(1900, 40);
    std::vector<std::vector<double>> preds;
    for (int j = 0; j < 6; ++j) preds.push_back(oracle::uniform_vector(rng, 40, 1.0, 20.0));
    std::vector<double> target;
    for (int i = 0; i < 40; ++i) {
      double lv = truth[0] + nd(rng);
      for (int j = 0; j < 6; ++j) lv += truth[j + 1] * std::log(preds[j][i]);
      target.push_back(std::exp(lv));
    }
    std::vector<TechSeries> others;
    for (int j = 1; j < 6; ++j) others.push_back(make("o" + std::to_string(j), Role::parasite, t, preds[j]));
    const auto fit = fit_evolution_multi(make("tgt", Role::parasite, t, target),
                                         make("h", Role::host, t, preds[0]), others);
    for (std::size_t j = 0; j < truth.size(); ++j) {
      ++total;
      if (std::fabs(fit.regression.coefficients[j] - truth[j]) <= 3.0 * fit.regression.standard_errors[j]) ++inside;
    }
  }
  EXPECT_GE(static_cast<double>(inside) / static_cast<double>(total), 0.95);
}

TEST(FitEvolutionMulti, DominanceOrderFollowsStandardizedMagnitude) {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> nd(0.0, 0.01);
  const auto t = years(1950, 30);
  const auto h = oracle::uniform_vector(rng, 30, 1.0, 10.0);
  const auto q = oracle::uniform_vector(rng, 30, 1.0, 10.0);
  std::vector<double> target;
  for (int i = 0; i < 30; ++i) target.push_back(std::exp(0.1 * std::log(h[i]) + 2.0 * std::log(q[i]) + nd(rng)));
  const auto fit = fit_evolution_multi(make("tgt", Role::parasite, t, target), make("h", Role::host, t, h),
                                       {make("q", Role::parasite, t, q)});
  EXPECT_EQ(fit.dominant_predictors, (std::vector<std::string>{"q", "h"}));
  EXPECT_NE(std::find(fit.significant_predictors.begin(), fit.significant_predictors.end(), "q"),
            fit.significant_predictors.end());
}

TEST(Correlation, SymmetricWithUnitDiagonalAndPairwiseCounts) {
  std::mt19937_64 rng(56);
  const auto a = make("a", Role::host, years(2000, 10), oracle::uniform_vector(rng, 10, 1.0, 5.0));
  const auto b = make("b", Role::parasite, years(2003, 10), oracle::uniform_vector(rng, 10, 1.0, 5.0));
  const auto c = make("c", Role::parasite, years(2008, 10), oracle::uniform_vector(rng, 10, 1.0, 5.0));
  const auto m = correlation_matrix({a, b, c});
  ASSERT_EQ(m.names.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(*m.cells[i][i].r, 1.0);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(m.cells[i][j].n, m.cells[j][i].n);
      EXPECT_EQ(m.cells[i][j].r.has_value(), m.cells[j][i].r.has_value());
      if (m.cells[i][j].r) {
        EXPECT_DOUBLE_EQ(*m.cells[i][j].r, *m.cells[j][i].r);
      }
    }
  }
  EXPECT_EQ(m.cells[0][1].n, 7u);
  EXPECT_EQ(m.cells[0][2].n, 2u);
  EXPECT_FALSE(m.cells[0][2].r.has_value());
  EXPECT_EQ(m.cells[1][2].n, 5u);
  ASSERT_TRUE(m.cells[1][2].r.has_value());
  const auto bl = b.log_values();
  const auto cl = c.log_values();
  EXPECT_NEAR(*m.cells[1][2].r,
              oracle::pearson_r({bl.begin() + 5, bl.end()}, {cl.begin(), cl.begin() + 5}), 1e-12);
  EXPECT_THROW(correlation_matrix({a}), Error);
}

TEST(Report, StructureAndDeterminism) {
  std::mt19937_64 rng(57);
  auto [h, p1] = noisy_pair(1.0, 1.6, 0.05, 30, rng);
  auto [h2, p2] = noisy_pair(1.0, 0.4, 0.05, 30, rng);
  (void)h2;
  ReportRequest req{h, {p1, p2.renamed("par2", Role::parasite)}, true, true};
  ReportOptions opt;
  const auto r1 = build_report(req, opt);
  const auto r2 = build_report(req, opt);
  ASSERT_EQ(r1.fits.size(), 2u);
  ASSERT_EQ(r1.multi_fits.size(), 1u);
  EXPECT_EQ(r1.correlations.names.size(), 3u);
  EXPECT_EQ(r1.descriptives.size(), 3u);
  EXPECT_EQ(r1.standardized_trajectories.size(), 3u);
  EXPECT_EQ(r1.fits[0].B, r2.fits[0].B);
  EXPECT_EQ(r1.fits[1].regression.p_values, r2.fits[1].regression.p_values);

  const auto d = r1.descriptives[0].stats;
  const auto o = oracle::moments(h.log_values());
  EXPECT_NEAR(d.mean, o.mean, 1e-12);
  for (const auto& tr : r1.standardized_trajectories) EXPECT_NEAR(stat::mean(tr.z), 0.0, 1e-12);

  ReportRequest pair{h, {p1}, true, false};
  EXPECT_TRUE(build_report(pair, opt).correlations.empty());
  opt.correlations = CorrelationPolicy::always;
  EXPECT_FALSE(build_report(pair, opt).correlations.empty());
}

TEST(Report, SevenSeriesBundle) {
  std::mt19937_64 rng(58);
  std::normal_distribution<double> nd(0.0, 0.02);
  const auto t = years(1970, 25);
  std::vector<double> h;
  for (int i = 0; i < 25; ++i) h.push_back(std::exp(0.08 * i + nd(rng)));
  const auto host = make("host", Role::host, t, h);
  std::vector<TechSeries> parasites;
  const std::vector<double> Bs{0.3, 0.7, 1.0, 1.3, 1.8, 2.4};
  for (std::size_t j = 0; j < Bs.size(); ++j) {
    std::vector<double> p;
    for (double hv : h) p.push_back(std::pow(hv, Bs[j]) * std::exp(nd(rng)));
    parasites.push_back(make("p" + std::to_string(j), Role::parasite, t, p));
  }
  const auto r = build_report({host, parasites, true, false}, {});
  ASSERT_EQ(r.fits.size(), 6u);
  EXPECT_EQ(r.correlations.names.size(), 7u);
  EXPECT_EQ(r.fits.front().classification.grade, 1);
  EXPECT_EQ(r.fits.back().classification.grade, 3);
  for (std::size_t j = 0; j < Bs.size(); ++j) EXPECT_NEAR(r.fits[j].B, Bs[j], 0.1);
}

TEST(Report, NoFitRequested) {
  const auto h = make("h", Role::host, years(1, 5), {1, 2, 3, 4, 5});
  EXPECT_THROW(build_report({h, {h}, false, false}, {}), Error);
  EXPECT_THROW(build_report({h, {}, true, false}, {}), Error);
}
