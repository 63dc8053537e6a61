#include "imprint/simulator.hpp"

#include <cmath>
#include <string>

#include "imprint/errors.hpp"

namespace imprint {

void ScenarioConfig::validate() const {
  if (!(maf > 0.0 && maf <= 0.5)) throw ConfigError("maf must be in (0, 0.5]");
  if (!(prev > 0.0 && prev < 1.0)) throw ConfigError("prev must be in (0, 1)");
  if (!(zeta_male >= 0.0 && zeta_male < 1.0) || !(zeta_female >= 0.0 && zeta_female < 1.0)) {
    throw ConfigError("inbreeding coefficients must be in [0, 1)");
  }
  if (n_case < 1 || n_control < 1) throw ConfigError("n_case and n_control must be >= 1");
  if (with_siblings && siblings_per_family < 1) throw ConfigError("siblings_per_family must be >= 1");
}

ScenarioConfig ScenarioConfig::standard(int index) {
  if (index < 1 || index > kScenarios) {
    throw ConfigError("scenario index must be in 1..8, got " + std::to_string(index));
  }
  const int i = index - 1;
  ScenarioConfig s;
  s.maf = (i / 4 == 0) ? 0.1 : 0.3;
  s.prev = ((i / 2) % 2 == 0) ? 0.05 : 0.15;
  s.hwe = (i % 2) == 1;
  return s;
}

DiseaseModel disease_model_risks(int model_index) {
  //                       R1   R2   Rim      S1   S2
  static constexpr double kRows[kDiseaseModels][5] = {
      {1, 1, 1, 1, 1},       {2, 3, 1, 1, 1},       {1, 3, 1, 1, 1}, {1, 3, 1, 2, 2},
      {1, 3, 3, 1, 1},       {3, 3, 1.0 / 3, 1, 1}, {1, 3, 3, 2, 2}, {3, 3, 1.0 / 3, 2, 2},
  };
  if (model_index < 1 || model_index > kDiseaseModels) {
    throw ConfigError("disease model index must be in 1..8, got " + std::to_string(model_index));
  }
  const auto& r = kRows[model_index - 1];
  return DiseaseModel{1.0, r[0], r[1], r[2], r[3], r[4]};
}

GenotypeDistribution genotype_distribution(double maf, bool hwe, double zeta) {
  const double p = maf;
  const double q = 1.0 - p;
  if (hwe) return {q * q, 2.0 * p * q, p * p};
  return {q * q * (1.0 - zeta) + q * zeta, 2.0 * p * q * (1.0 - zeta), p * p * (1.0 - zeta) + p * zeta};
}

MatingTypeDistribution mating_distribution(const ScenarioConfig& scenario) {
  const auto mother = genotype_distribution(scenario.maf, scenario.hwe, scenario.zeta_female);
  const auto father = genotype_distribution(scenario.maf, scenario.hwe, scenario.zeta_male);
  MatingTypeDistribution mu;
  for (int m = 0; m < 3; ++m) {
    for (int f = 0; f < 3; ++f) mu.mu[static_cast<std::size_t>(3 * m + f)] = mother[m] * father[f];
  }
  return mu;
}

double calibrate_delta(const DiseaseModel& risks, const ScenarioConfig& scenario) {
  scenario.validate();
  const auto mu = mating_distribution(scenario);
  double expected_multiplier = 0.0;
  for (const auto& t : trio_types()) {
    expected_multiplier += mu.mu[static_cast<std::size_t>(t.mating_index())] *
                           t.transmission.value() * table_multiplier(risks, t);
  }
  DiseaseModel theta = risks;
  theta.delta = scenario.prev / expected_multiplier;
  if (!(theta.delta < 1.0) || !validate_penetrance_bounds(theta)) {
    throw CalibrationInfeasible("prevalence " + std::to_string(scenario.prev) +
                                " needs delta = " + std::to_string(theta.delta) +
                                ", which pushes a penetrance above 1");
  }
  return theta.delta;
}

DiseaseModel calibrated_model(int model_index, const ScenarioConfig& scenario) {
  DiseaseModel theta = disease_model_risks(model_index);
  theta.delta = calibrate_delta(theta, scenario);
  return theta;
}

namespace {

class FamilyDraw {
 public:
  FamilyDraw(const DiseaseModel& theta, const ScenarioConfig& scenario)
      : theta_(theta),
        mother_(genotype_distribution(scenario.maf, scenario.hwe, scenario.zeta_female)),
        father_(genotype_distribution(scenario.maf, scenario.hwe, scenario.zeta_male)) {}

  int parent(const GenotypeDistribution& dist, Rng& rng) {
    const double u = uniform_(rng);
    if (u < dist[0]) return 0;
    return u < dist[0] + dist[1] ? 1 : 2;
  }
  int mother(Rng& rng) { return parent(mother_, rng); }
  int father(Rng& rng) { return parent(father_, rng); }

  struct Child {
    int copies;
    bool affected;
  };

  // A parent with g copies transmits the minor allele with probability g/2.
  Child child(int m, int f, Rng& rng) {
    const bool from_mother = m == 2 || (m == 1 && uniform_(rng) < 0.5);
    const bool from_father = f == 2 || (f == 1 && uniform_(rng) < 0.5);
    const int c = static_cast<int>(from_mother) + static_cast<int>(from_father);
    const bool maternal_origin = c == 1 && from_mother;
    const double pen = penetrance_with_origin(theta_, m, f, c, maternal_origin);
    return Child{c, uniform_(rng) < pen};
  }

 private:
  DiseaseModel theta_;
  GenotypeDistribution mother_;
  GenotypeDistribution father_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace

FamilyCounts simulate_dataset(const DiseaseModel& theta, const ScenarioConfig& scenario, Rng& rng) {
  scenario.validate();
  if (!theta.has_valid_domain() || !validate_penetrance_bounds(theta)) {
    throw ConfigError("disease model is outside the feasible region");
  }
  FamilyDraw draw(theta, scenario);
  FamilyCounts y;
  long cases = 0;
  long controls = 0;
  while (cases < scenario.n_case || controls < scenario.n_control) {
    const int m = draw.mother(rng);
    const int f = draw.father(rng);
    const auto proband = draw.child(m, f, rng);
    const auto idx = static_cast<std::size_t>(trio_index_of(m, f, proband.copies) - 1);
    if (proband.affected) {
      if (cases >= scenario.n_case) continue;
      ++y.n1[idx];
      ++cases;
    } else {
      if (controls >= scenario.n_control) continue;
      ++y.n0[idx];
      ++controls;
    }
    if (!scenario.with_siblings) continue;
    for (long s = 0; s < scenario.siblings_per_family; ++s) {
      const auto sib = draw.child(m, f, rng);
      const auto sidx = static_cast<std::size_t>(trio_index_of(m, f, sib.copies) - 1);
      ++(sib.affected ? y.sn1 : y.sn0)[sidx];
    }
  }
  return y;
}

}  // namespace imprint
