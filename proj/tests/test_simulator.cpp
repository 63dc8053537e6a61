#include <cmath>

#include "doctest.h"
#include "imprint/errors.hpp"
#include "imprint/simulator.hpp"
#include "oracles.hpp"

using namespace imprint;

TEST_CASE("genotype distributions") {
  const auto hwe = genotype_distribution(0.3, true, 0.3);
  CHECK(hwe[0] == doctest::Approx(0.49));
  CHECK(hwe[1] == doctest::Approx(0.42));
  CHECK(hwe[2] == doctest::Approx(0.09));
  const auto inbred = genotype_distribution(0.1, false, 0.3);
  CHECK(inbred[0] == doctest::Approx(0.837));
  CHECK(inbred[1] == doctest::Approx(0.126));
  CHECK(inbred[2] == doctest::Approx(0.037));
  CHECK(inbred[0] + inbred[1] + inbred[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mating distribution is a product of the parental marginals") {
  for (int s = 1; s <= kScenarios; ++s) {
    const ScenarioConfig sc = ScenarioConfig::standard(s);
    const auto mu = mating_distribution(sc);
    double total = 0.0;
    for (double v : mu.mu) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    const auto mom = genotype_distribution(sc.maf, sc.hwe, sc.zeta_female);
    const auto dad = genotype_distribution(sc.maf, sc.hwe, sc.zeta_male);
    CHECK(mu(2, 1) == doctest::Approx(mom[2] * dad[1]));
    if (sc.hwe) CHECK(mu(1, 2) == doctest::Approx(mu(2, 1)));
  }
}

TEST_CASE("standard scenarios") {
  CHECK(ScenarioConfig::standard(1).maf == 0.1);
  CHECK(ScenarioConfig::standard(8).maf == 0.3);
  CHECK(ScenarioConfig::standard(3).prev == 0.15);
  CHECK(ScenarioConfig::standard(2).hwe);
  CHECK_FALSE(ScenarioConfig::standard(7).hwe);
  CHECK_THROWS_AS(ScenarioConfig::standard(9), ConfigError);
  CHECK_THROWS_AS(disease_model_risks(0), ConfigError);
  CHECK(disease_model_risks(6).rim == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("calibration reproduces the prevalence") {
  for (int m = 1; m <= kDiseaseModels; ++m) {
    for (int s = 1; s <= kScenarios; ++s) {
      const ScenarioConfig sc = ScenarioConfig::standard(s);
      const DiseaseModel theta = calibrated_model(m, sc);
      const auto mu = mating_distribution(sc);
      CHECK(oracle::prevalence(theta, mu) == doctest::Approx(sc.prev).epsilon(1e-12));
    }
  }
  ScenarioConfig extreme;
  extreme.maf = 0.5;
  extreme.prev = 0.9;
  CHECK_THROWS_AS(calibrated_model(8, extreme), CalibrationInfeasible);
}

TEST_CASE("datasets have the requested size and are reproducible") {
  const ScenarioConfig sc = ScenarioConfig::standard(5);
  const DiseaseModel theta = calibrated_model(7, sc);
  Rng a(11), b(11);
  const FamilyCounts ya = simulate_dataset(theta, sc, a);
  const FamilyCounts yb = simulate_dataset(theta, sc, b);
  CHECK(ya.n1 == yb.n1);
  CHECK(ya.n0 == yb.n0);
  CHECK(FamilyCounts::total(ya.n1) == 150);
  CHECK(FamilyCounts::total(ya.n0) == 150);
  CHECK_FALSE(ya.has_siblings());

  ScenarioConfig sib = sc;
  sib.with_siblings = true;
  sib.siblings_per_family = 2;
  Rng c(11);
  const FamilyCounts ys = simulate_dataset(theta, sib, c);
  CHECK(FamilyCounts::total(ys.sn1) + FamilyCounts::total(ys.sn0) == 600);
}

TEST_CASE("maternal imprinting shows up in heterozygous-offspring types") {
  ScenarioConfig sc = ScenarioConfig::standard(8);
  sc.n_case = 20000;
  sc.n_control = 1;
  Rng rng(4);
  const FamilyCounts y = simulate_dataset(calibrated_model(5, sc), sc, rng);
  // (1,0,1) carries a maternal variant, (0,1,1) a paternal one.
  CHECK(y.n1[trio_index_of(1, 0, 1) - 1] > 1.5 * y.n1[trio_index_of(0, 1, 1) - 1]);
}

TEST_CASE("case trio frequencies match the conditional model") {
  ScenarioConfig sc = ScenarioConfig::standard(6);
  sc.n_case = 40000;
  sc.n_control = 40000;
  const DiseaseModel theta = calibrated_model(8, sc);
  const auto mu = mating_distribution(sc);
  Rng rng(21);
  const FamilyCounts y = simulate_dataset(theta, sc, rng);
  const double prev = oracle::prevalence(theta, mu);
  for (const auto& t : trio_types()) {
    const auto idx = static_cast<std::size_t>(t.index - 1);
    const double p1 = oracle::joint(theta, mu, t.mother, t.father, t.child, true) / prev;
    const double p0 = oracle::joint(theta, mu, t.mother, t.father, t.child, false) / (1.0 - prev);
    const double se1 = std::sqrt(p1 * (1 - p1) / 40000.0);
    const double se0 = std::sqrt(p0 * (1 - p0) / 40000.0);
    CHECK(std::abs(static_cast<double>(y.n1[idx]) / 40000.0 - p1) < 4 * se1 + 1e-12);
    CHECK(std::abs(static_cast<double>(y.n0[idx]) / 40000.0 - p0) < 4 * se0 + 1e-12);
  }
}

TEST_CASE("siblings are affected at the model penetrance") {
  ScenarioConfig sc = ScenarioConfig::standard(4);
  sc.with_siblings = true;
  sc.siblings_per_family = 3;
  sc.n_case = 20000;
  sc.n_control = 20000;
  const DiseaseModel theta = calibrated_model(7, sc);
  Rng rng(31);
  const FamilyCounts y = simulate_dataset(theta, sc, rng);
  for (const auto& t : trio_types()) {
    const auto idx = static_cast<std::size_t>(t.index - 1);
    const double n = static_cast<double>(y.sn1[idx] + y.sn0[idx]);
    if (n < 500) continue;
    const auto k = oracle::child_terms(theta, t.mother, t.father, t.child);
    const double pen = k.affected / k.transmission;
    CHECK(std::abs(static_cast<double>(y.sn1[idx]) / n - pen) < 4 * std::sqrt(pen * (1 - pen) / n));
  }
}
