#pragma once

// Case-parent / control-parent trio simulation under the eight disease
// models and eight population scenarios of the simulation study.

#include <array>
#include <cstdint>

#include "imprint/genetics.hpp"
#include "imprint/likelihood.hpp"
#include "imprint/sampler.hpp"

namespace imprint {

struct ScenarioConfig {
  double maf = 0.1;
  double prev = 0.05;
  bool hwe = true;
  double zeta_male = 0.1;
  double zeta_female = 0.3;
  long n_case = 150;
  long n_control = 150;
  bool with_siblings = false;
  long siblings_per_family = 1;

  void validate() const;
  // Scenarios 1..8: maf in {0.1, 0.3} x prev in {0.05, 0.15} x hwe in {0, 1}.
  static ScenarioConfig standard(int index);
};

inline constexpr int kDiseaseModels = 8;
inline constexpr int kScenarios = 8;

// Relative risks of disease model 1..8 with delta left at 1 (set by calibration).
DiseaseModel disease_model_risks(int model_index);

using GenotypeDistribution = std::array<double, 3>;

// HWE: ((1-p)^2, 2p(1-p), p^2). Otherwise the inbreeding model
// ((1-p)^2(1-z) + (1-p)z, 2p(1-p)(1-z), p^2(1-z) + pz).
GenotypeDistribution genotype_distribution(double maf, bool hwe, double zeta);

// mu_mf = P_female(m) * P_male(f).
MatingTypeDistribution mating_distribution(const ScenarioConfig& scenario);

// delta such that P(D=1) equals the scenario prevalence. Throws
// CalibrationInfeasible when that delta pushes a penetrance above 1.
double calibrate_delta(const DiseaseModel& risks, const ScenarioConfig& scenario);
DiseaseModel calibrated_model(int model_index, const ScenarioConfig& scenario);

// Draws families until n_case case trios and n_control control trios are
// collected; the first child is the proband. With siblings, each retained
// family contributes siblings_per_family extra children tallied by their
// own trio type and affection status.
FamilyCounts simulate_dataset(const DiseaseModel& theta, const ScenarioConfig& scenario, Rng& rng);

}  // namespace imprint
