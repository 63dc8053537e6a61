#include "doctest.h"
#include "imprint/errors.hpp"
#include "imprint/inference.hpp"
#include "imprint/simulator.hpp"

using namespace imprint;

namespace {

McemFit fake_fit(double q, std::uint64_t fingerprint = 7) {
  McemFit f;
  f.q_data_term = q;
  f.data_fingerprint = fingerprint;
  return f;
}

}  // namespace

TEST_CASE("hypothesis masks and degrees of freedom") {
  FamilyCounts y;
  y.n1[0] = 1;
  y.n0[0] = 1;
  CHECK(HypothesisSpec::make(TestKind::kImprinting, y).df == 1);
  CHECK(HypothesisSpec::make(TestKind::kMaternal, y).df == 2);
  CHECK(HypothesisSpec::make(TestKind::kAssociation, y).df == 6);
  y.sn0[3] = 1;
  CHECK(HypothesisSpec::make(TestKind::kAssociation, y).df == 5);
  CHECK(HypothesisSpec::make(TestKind::kAssociation, y, 4).df == 4);
  CHECK(HypothesisSpec::make(TestKind::kMaternal, y).mask == ParameterMask::maternal_null());
  CHECK_THROWS_AS(HypothesisSpec::make(TestKind::kMaternal, y, 0), ConfigError);
}

TEST_CASE("likelihood-ratio statistic forms") {
  CHECK(lr_statistic(fake_fit(-100), fake_fit(-100), StatisticForm::kDifference).value == 0.0);
  CHECK(lr_statistic(fake_fit(-103), fake_fit(-100), StatisticForm::kDifference).value == doctest::Approx(6.0));
  CHECK(lr_statistic(fake_fit(-103), fake_fit(-100), StatisticForm::kRatio).value ==
        doctest::Approx(-2.0 * std::log(103.0 / 100.0) < 0 ? 0.0 : -2.0 * std::log(103.0 / 100.0)));
  CHECK(lr_statistic(fake_fit(-100), fake_fit(-103), StatisticForm::kRatio).raw ==
        doctest::Approx(-2.0 * std::log(100.0 / 103.0)));
  const Statistic inverted = lr_statistic(fake_fit(-99), fake_fit(-100), StatisticForm::kDifference);
  CHECK(inverted.clamped);
  CHECK(inverted.value == 0.0);
  CHECK(inverted.raw == doctest::Approx(-2.0));
  CHECK_THROWS_AS(lr_statistic(fake_fit(-1, 1), fake_fit(-1, 2), StatisticForm::kDifference), MismatchedData);
}

TEST_CASE("chi-square upper tail") {
  CHECK(chi_square_upper_tail(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_square_upper_tail(5.991464547107979, 2) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_square_upper_tail(12.591587243743977, 6) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(chi_square_upper_tail(0.0, 3) == 1.0);
  double prev = 1.0;
  for (double x = 0.1; x < 40; x += 0.7) {
    const double p = chi_square_upper_tail(x, 5);
    CHECK(p < prev);
    CHECK(p >= 0.0);
    prev = p;
  }
}

TEST_CASE("exact likelihoods: statistic equals twice the maximized log-likelihood gap") {
  // With one fixed sample at the true mating distribution, Q is the exact
  // log likelihood and the theta steps are exact maximizations.
  const ScenarioConfig sc = ScenarioConfig::standard(6);
  Rng rng(3);
  const FamilyCounts y = simulate_dataset(calibrated_model(5, sc), sc, rng);
  const MatingTypeDistribution mu = mating_distribution(sc);
  const std::vector<SimplexSample> point{SimplexSample::from_probabilities(mu.mu)};
  const SampleSet s(point);
  ParameterMask alt;
  const DiseaseModel base{0.02, 1.0, 3.0, 1.0, 1.0, 1.0};
  for (auto p : {Parameter::kDelta, Parameter::kR1, Parameter::kR2, Parameter::kS1, Parameter::kS2}) {
    alt.fix(p, base.get(p));
  }
  ParameterMask null = alt;
  null.fix(Parameter::kRim, 1.0);
  McemFit a = fake_fit(maximize_theta(y, s, base, alt).q);
  McemFit n = fake_fit(maximize_theta(y, s, base, null).q);
  double best = -1e300;
  for (int i = 0; i <= 20000; ++i) {
    DiseaseModel t = base;
    t.rim = std::exp(-2.0 + 4.0 * i / 20000.0);
    if (validate_penetrance_bounds(t)) best = std::max(best, full_log_likelihood(y, t, mu));
  }
  const double oracle = 2.0 * (best - full_log_likelihood(y, base, mu));
  CHECK(lr_statistic(n, a, StatisticForm::kDifference).value == doctest::Approx(oracle).epsilon(1e-4));
}

TEST_CASE("run_tests shares the alternative and matches single runs") {
  const ScenarioConfig sc = ScenarioConfig::standard(8);
  Rng rng(12);
  const FamilyCounts y = simulate_dataset(calibrated_model(7, sc), sc, rng);
  TestConfig cfg;
  cfg.fit.chain = ChainConfig{200, 4, 250, 1};
  cfg.fit.max_iterations = 30;
  cfg.levels = {0.01, 0.05};
  const TestBattery all = run_tests(y, {TestKind::kImprinting, TestKind::kMaternal}, cfg, 77);
  REQUIRE(all.results.size() == 2);
  const TestResult single = run_test(y, TestKind::kMaternal, cfg, 77);
  CHECK(single.statistic == all.results[1].statistic);
  CHECK(single.p_value == all.results[1].p_value);
  for (const auto& r : all.results) {
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    CHECK(r.statistic >= 0.0);
    CHECK(r.null_fit.iterations_used == r.alt_fit.iterations_used);
    CHECK(r.compared_at_iteration == r.alt_fit.iterations_used);
    CHECK(r.reject_at.size() == 2);
    if (r.reject_at.at(0.01)) CHECK(r.reject_at.at(0.05));
  }
  CHECK(all.results[0].null_fit.theta.rim == 1.0);
  CHECK(all.results[1].null_fit.theta.s1 == 1.0);
  CHECK(all.results[1].null_fit.theta.s2 == 1.0);
}

TEST_CASE("names parse") {
  CHECK(parse_test_kind("Imprinting") == TestKind::kImprinting);
  CHECK_THROWS_AS(parse_test_kind("dominance"), ConfigError);
  CHECK(parse_statistic_form("ratio") == StatisticForm::kRatio);
  CHECK_THROWS_AS(parse_statistic_form("wald"), ConfigError);
}
