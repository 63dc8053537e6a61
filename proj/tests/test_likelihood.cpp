#include <random>

#include "doctest.h"
#include "imprint/errors.hpp"
#include "imprint/likelihood.hpp"
#include "oracles.hpp"

using namespace imprint;

namespace {

FamilyCounts toy_counts(std::mt19937_64& g, int families, bool siblings) {
  FamilyCounts y;
  std::uniform_int_distribution<int> type(0, kTrioTypes - 1);
  y.n1[static_cast<std::size_t>(type(g))] += 1;
  y.n0[static_cast<std::size_t>(type(g))] += 1;
  for (int i = 2; i < families; ++i) {
    auto& v = (g() & 1) ? y.n1 : y.n0;
    v[static_cast<std::size_t>(type(g))] += 1;
  }
  if (siblings) {
    y.sn1[static_cast<std::size_t>(type(g))] += 1;
    y.sn0[static_cast<std::size_t>(type(g))] += 1;
  }
  return y;
}

MatingTypeDistribution interior_mu(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  MatingTypeDistribution mu;
  double s = 0.0;
  for (double& v : mu.mu) s += (v = u(g));
  for (double& v : mu.mu) v /= s;
  return mu;
}

}  // namespace

TEST_CASE("prevalence equals the enumeration oracle") {
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 50; ++rep) {
    const DiseaseModel t{0.05, 1.5, 2.5, 0.7, 1.3, 1.9};
    const auto mu = interior_mu(g);
    CHECK(prevalence(t, mu) == doctest::Approx(oracle::prevalence(t, mu)).epsilon(1e-13));
  }
}

TEST_CASE("full log likelihood equals the brute-force product over families") {
  std::mt19937_64 g(17);
  for (int rep = 0; rep < 40; ++rep) {
    const FamilyCounts y = toy_counts(g, 2 + rep % 4, rep % 2 == 1);
    const DiseaseModel t{0.03 + 0.01 * (rep % 5), 1.0 + 0.05 * rep, 2.0, 0.5 + 0.03 * rep, 1.2, 0.8};
    const auto mu = interior_mu(g);
    const double got = full_log_likelihood(y, t, mu);
    const double want = oracle::log_likelihood_product(y, t, mu);
    CHECK(std::abs(got - want) <= 1e-10 * std::abs(want));
  }
}

TEST_CASE("conditional probabilities of each disease class sum to one") {
  std::mt19937_64 g(4);
  const DiseaseModel t{0.02, 2, 3, 3, 2, 2};
  const auto mu = interior_mu(g);
  for (bool d : {true, false}) {
    double s = 0.0;
    for (const auto& trio : trio_types()) s += conditional_trio_prob(t, mu, trio, d);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("zero counts contribute nothing and impossible positive counts throw") {
  FamilyCounts y;
  y.n1[0] = 1;
  y.n0[0] = 1;
  MatingTypeDistribution mu;
  mu.mu[0] = 0.5;
  mu.mu[4] = 0.5;
  const DiseaseModel t{0.1, 1, 1, 1, 1, 1};
  // mu_01 = 0, but type 2 has no families: the term is skipped.
  CHECK(std::isfinite(full_log_likelihood(y, t, mu)));
  y.n1[1] = 1;
  CHECK_THROWS_AS(full_log_likelihood(y, t, mu), LogOfZero);
  try {
    full_log_likelihood(y, t, mu);
  } catch (const LogOfZero& e) {
    CHECK(e.trio_index() == 2);
  }
}

TEST_CASE("degenerate prevalence is rejected") {
  FamilyCounts y;
  y.n1[0] = 1;
  y.n0[0] = 1;
  MatingTypeDistribution mu;
  mu.mu[0] = 1.0;
  CHECK_THROWS_AS(conditional_trio_prob(DiseaseModel{1.0, 1, 1, 1, 1, 1}, mu, trio_type(1), true),
                  DegenerateDenominator);
}

TEST_CASE("factorized kernel reproduces the full log likelihood") {
  std::mt19937_64 g(23);
  for (int rep = 0; rep < 30; ++rep) {
    FamilyCounts y = toy_counts(g, 40, rep % 3 == 0);
    const DiseaseModel t{0.04, 1.7, 2.2, 1.4, 0.9, 1.6};
    const LikelihoodKernel kernel(y, t);
    const auto mu = interior_mu(g);
    CHECK(kernel.log_likelihood(mu) == doctest::Approx(full_log_likelihood(y, t, mu)).epsilon(1e-12));
  }
}

TEST_CASE("counts validation and fingerprint") {
  FamilyCounts y;
  CHECK_THROWS_AS(y.validate(), ConfigError);
  y.n1[3] = 2;
  y.n0[4] = 1;
  CHECK_NOTHROW(y.validate());
  FamilyCounts z = y;
  CHECK(z.fingerprint() == y.fingerprint());
  z.sn1[0] = 1;
  CHECK(z.fingerprint() != y.fingerprint());
  CHECK(z.has_siblings());
  z.n0[1] = -1;
  CHECK_THROWS_AS(z.validate(), ConfigError);
}
