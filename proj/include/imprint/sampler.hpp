#pragma once

// Dirichlet distribution on the mating-type simplex and the
// Metropolis-Hastings independence chain targeting f(Z | Y) with proposals
// drawn from the current Dirichlet g(Z; alpha).

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "imprint/genetics.hpp"
#include "imprint/likelihood.hpp"

namespace imprint {

using Rng = std::mt19937_64;

// Mixes a master seed with stream identifiers (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0, std::uint64_t d = 0);

struct DirichletParams {
  std::array<double, kMatingTypes> alpha{};

  double sum() const;
  MatingTypeDistribution mean() const;
  // Throws ConfigError unless every entry is finite and positive.
  void validate() const;
  static DirichletParams uniform(double value = 1.0);
};

// A strictly interior point of the simplex with its coordinate logs.
struct SimplexSample {
  std::array<double, kMatingTypes> z{};
  std::array<double, kMatingTypes> log_z{};

  static SimplexSample from_probabilities(const std::array<double, kMatingTypes>& z);
  MatingTypeDistribution as_distribution() const { return MatingTypeDistribution{z}; }
};

struct ChainConfig {
  long burn_in = 10000;
  long thin = 500;
  long keep = 10000;
  std::uint64_t seed = 1;

  void validate() const;
  long proposals() const { return burn_in + keep * thin; }
};

double log_beta_function(const DirichletParams& alpha);
double dirichlet_log_pdf(const DirichletParams& alpha, const SimplexSample& z);

// Gamma-variate construction; small shapes are drawn in log space so that
// coordinates stay strictly positive.
class DirichletSampler {
 public:
  explicit DirichletSampler(const DirichletParams& alpha);
  SimplexSample operator()(Rng& rng);

 private:
  DirichletParams alpha_;
  std::gamma_distribution<double> gamma_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

SimplexSample dirichlet_sample(const DirichletParams& alpha, Rng& rng);

// f(Y | z*) / f(Y | z), evaluated through full_log_likelihood.
double mh_ratio(const FamilyCounts& y, const DiseaseModel& theta, const SimplexSample& current,
                const SimplexSample& proposed);

// One Metropolis-Hastings decision, reported to an optional observer.
struct ProposalEvent {
  long step;
  double current_log_lik;
  double proposed_log_lik;
  double log_uniform;
  bool accepted;
};
using ProposalObserver = std::function<void(const ProposalEvent&)>;

struct ChainResult {
  std::vector<SimplexSample> samples;
  long proposals = 0;
  long accepted = 0;
  double acceptance_rate = 0.0;
  // Largest absolute lag-1 autocorrelation over the nine coordinates of the kept samples.
  double lag1_autocorrelation = 0.0;
  bool low_acceptance = false;  // acceptance_rate < 0.01
};

inline constexpr double kLowAcceptanceRate = 0.01;

// Independence chain for an arbitrary log likelihood of z. The chain starts
// at the proposal mean; the state after burn_in + j*thin proposals is kept
// for j = 1..keep.
ChainResult run_independence_chain(
    const std::function<double(const SimplexSample&)>& log_likelihood,
    const DirichletParams& alpha, const ChainConfig& cfg, Rng& rng,
    const ProposalObserver& observer = {});

// Chain targeting f(Z | Y) proportional to f(Y | Z; theta) g(Z; alpha).
ChainResult run_chain(const FamilyCounts& y, const DiseaseModel& theta,
                      const DirichletParams& alpha, const ChainConfig& cfg, Rng& rng,
                      const ProposalObserver& observer = {});

}  // namespace imprint
