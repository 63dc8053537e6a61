#include <random>

#include "doctest.h"
#include "imprint/errors.hpp"
#include "imprint/genetics.hpp"
#include "oracles.hpp"

using namespace imprint;

namespace {

DiseaseModel random_theta(std::mt19937_64& g) {
  std::uniform_real_distribution<double> risk(0.2, 3.0);
  DiseaseModel t{0.0, risk(g), risk(g), risk(g), risk(g), risk(g)};
  double worst = 1.0;
  for (double a : {t.r1, t.r2}) worst = std::max(worst, a);
  worst *= std::max({1.0, t.rim}) * std::max({1.0, t.s1, t.s2});
  t.delta = std::uniform_real_distribution<double>(0.001, 0.99)(g) / worst;
  return t;
}

MatingTypeDistribution random_mu(std::mt19937_64& g) {
  std::gamma_distribution<double> gam(0.7, 1.0);
  MatingTypeDistribution mu;
  double s = 0.0;
  for (double& v : mu.mu) s += (v = gam(g) + 1e-6);
  for (double& v : mu.mu) v /= s;
  return mu;
}

}  // namespace

TEST_CASE("trio table matches the published type ordering and transmission factors") {
  // (type, m, f, c, P(C|m,f) numerator, denominator)
  const int expected[15][6] = {{1, 0, 0, 0, 1, 1},  {2, 0, 1, 0, 1, 2},  {3, 0, 1, 1, 1, 2},
                               {4, 0, 2, 1, 1, 1},  {5, 1, 0, 0, 1, 2},  {6, 1, 0, 1, 1, 2},
                               {7, 1, 1, 0, 1, 4},  {8, 1, 1, 1, 1, 2},  {9, 1, 1, 2, 1, 4},
                               {10, 1, 2, 1, 1, 2}, {11, 1, 2, 2, 1, 2}, {12, 2, 0, 1, 1, 1},
                               {13, 2, 1, 1, 1, 2}, {14, 2, 1, 2, 1, 2}, {15, 2, 2, 2, 1, 1}};
  for (const auto& row : expected) {
    const TrioType& t = trio_type(row[0]);
    CHECK(t.mother == row[1]);
    CHECK(t.father == row[2]);
    CHECK(t.child == row[3]);
    CHECK(t.transmission == Rational{row[4], row[5]});
    CHECK(trio_index_of(row[1], row[2], row[3]) == row[0]);
  }
  CHECK(trio_index_of(0, 0, 1) == 0);
  CHECK(trio_index_of(2, 2, 1) == 0);
}

TEST_CASE("parental origin of a single minor-allele copy") {
  for (int i : {6, 12, 13}) CHECK(trio_type(i).origin == AlleleOrigin::kMaternal);
  for (int i : {3, 4, 10}) CHECK(trio_type(i).origin == AlleleOrigin::kPaternal);
  CHECK(trio_type(8).origin == AlleleOrigin::kAmbiguous);
  for (int i : {1, 2, 5, 7, 9, 11, 14, 15}) CHECK(trio_type(i).origin == AlleleOrigin::kNone);
}

TEST_CASE("transmission rows sum to one exactly") {
  for (int m = 0; m < 3; ++m) {
    for (int f = 0; f < 3; ++f) {
      Rational total{0, 1};
      for (const auto& [c, p] : transmission(GenotypeCount(m), GenotypeCount(f))) total = total + p;
      CHECK(total == Rational{1, 1});
    }
  }
  const auto het = transmission(GenotypeCount(1), GenotypeCount(1));
  CHECK(het.at(0) == Rational{1, 4});
  CHECK(het.at(1) == Rational{1, 2});
  CHECK(het.at(2) == Rational{1, 4});
  CHECK_THROWS_AS(GenotypeCount(3), ConfigError);
}

TEST_CASE("penetrance agrees with allele-level enumeration for every type") {
  std::mt19937_64 g(11);
  for (int rep = 0; rep < 200; ++rep) {
    const DiseaseModel t = random_theta(g);
    for (const auto& trio : trio_types()) {
      const auto k = oracle::child_terms(t, trio.mother, trio.father, trio.child);
      CHECK(penetrance(t, trio) == doctest::Approx(k.affected / k.transmission).epsilon(1e-13));
    }
  }
}

TEST_CASE("type 8 averages both origins") {
  const DiseaseModel t{0.01, 2.0, 3.0, 3.0, 1.5, 2.0};
  CHECK(penetrance(t, trio_type(8)) == doctest::Approx(0.01 * 1.5 * 2.0 * (1 + 3.0) / 2));
  CHECK(penetrance_with_origin(t, 1, 1, 1, true) == doctest::Approx(0.01 * 1.5 * 2.0 * 3.0));
  CHECK(penetrance_with_origin(t, 1, 1, 1, false) == doctest::Approx(0.01 * 1.5 * 2.0));
}

TEST_CASE("joint probabilities sum to one over types and disease states") {
  std::mt19937_64 g(5);
  for (int rep = 0; rep < 1000; ++rep) {
    const DiseaseModel t = random_theta(g);
    const MatingTypeDistribution mu = random_mu(g);
    double total = 0.0;
    for (const auto& trio : trio_types()) {
      for (bool d : {true, false}) {
        const double p = joint_probability(t, mu, trio, d);
        CHECK(p >= 0.0);
        total += p;
      }
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("joint probability of a type equals the enumeration oracle") {
  std::mt19937_64 g(8);
  for (int rep = 0; rep < 100; ++rep) {
    const DiseaseModel t = random_theta(g);
    const MatingTypeDistribution mu = random_mu(g);
    for (const auto& trio : trio_types()) {
      for (bool d : {true, false}) {
        CHECK(joint_probability(t, mu, trio, d) ==
              doctest::Approx(oracle::joint(t, mu, trio.mother, trio.father, trio.child, d)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("penetrance bounds cover both origin branches") {
  DiseaseModel t{0.2, 1.0, 1.0, 4.5, 1.0, 1.0};
  // Averaged type 8 is 0.2 * 5.5 / 2 = 0.55, but the maternal branch is 0.9.
  CHECK(validate_penetrance_bounds(t));
  t.rim = 5.5;  // maternal branch 1.1
  CHECK_FALSE(validate_penetrance_bounds(t));
  CHECK_THROWS_AS(penetrance(DiseaseModel{0.5, 3.0, 1, 1, 1, 1}, trio_type(3)), PenetranceOverflow);
}

TEST_CASE("parameter names round-trip case-insensitively") {
  for (int i = 0; i < kParameters; ++i) {
    Parameter p{};
    const auto name = std::string(parameter_name(static_cast<Parameter>(i)));
    REQUIRE(parse_parameter(name, p));
    CHECK(p == static_cast<Parameter>(i));
    std::string upper = name;
    for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    CHECK(parse_parameter(upper, p));
  }
  Parameter p{};
  CHECK_FALSE(parse_parameter("r3", p));
  const DiseaseModel t{0.1, 2, 3, 4, 5, 6};
  CHECK(DiseaseModel::from_array(t.as_array()).as_array() == t.as_array());
}

TEST_CASE("mating distribution validation") {
  CHECK_NOTHROW(MatingTypeDistribution::uniform().validate());
  MatingTypeDistribution mu = MatingTypeDistribution::uniform();
  mu.mu[0] += 1e-6;
  CHECK_THROWS_AS(mu.validate(), ConfigError);
}
