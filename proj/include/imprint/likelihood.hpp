#pragma once

// Observed-data log likelihood of case-parent / control-parent trio counts
// (plus optional sibling-parent trios) for a fixed mating-type point.

#include <array>
#include <cstdint>
#include <span>

#include "imprint/genetics.hpp"

namespace imprint {

using TypeCounts = std::array<long, kTrioTypes>;

// Counts indexed by trio type (entry 0 is type 1).
struct FamilyCounts {
  TypeCounts n1{};   // case-parent trios
  TypeCounts n0{};   // control-parent trios
  TypeCounts sn1{};  // affected-sibling trios
  TypeCounts sn0{};  // unaffected-sibling trios

  static long total(const TypeCounts& counts);
  bool has_siblings() const { return total(sn1) + total(sn0) > 0; }
  // Throws ConfigError on negative entries or when no case or control trio is present.
  void validate() const;
  // Stable 64-bit digest of the counts; used to check two fits saw the same data.
  std::uint64_t fingerprint() const;

  bool operator==(const FamilyCounts&) const = default;
};

// P(D=1) = sum over the 15 table rows of the affected joint probability.
double prevalence(const DiseaseModel& theta, const MatingTypeDistribution& mu);

// P(M,F,C | D). Throws DegenerateDenominator when prevalence is 0 or 1.
double conditional_trio_prob(const DiseaseModel& theta, const MatingTypeDistribution& mu,
                             const TrioType& trio, bool affected);

// Natural-log full likelihood; zero counts contribute exactly 0. Throws
// LogOfZero naming the trio type when a positive count meets probability 0.
double full_log_likelihood(const FamilyCounts& y, const DiseaseModel& theta,
                           const MatingTypeDistribution& mu);

// The full log likelihood factorized for fixed (Y, theta):
//
//   l(z) = const + sum_mf c_mf log z_mf - N1 log(a.z) - N0 log(b.z)
//
// where a_mf = sum_c P(c|m,f) pen, b_mf = sum_c P(c|m,f) (1 - pen), c_mf
// pools case and control counts of mating type mf and `const` collects every
// term free of z (including the sibling terms). Evaluating l costs two
// 9-dot products and two logs once log z is known.
class LikelihoodKernel {
 public:
  LikelihoodKernel(const FamilyCounts& y, const DiseaseModel& theta);

  double log_likelihood(std::span<const double, kMatingTypes> z,
                        std::span<const double, kMatingTypes> log_z) const;
  double log_likelihood(const MatingTypeDistribution& mu) const;

  double theta_constant() const { return constant_; }
  const std::array<double, kMatingTypes>& affected_mass() const { return affected_; }
  const std::array<double, kMatingTypes>& unaffected_mass() const { return unaffected_; }
  const std::array<double, kMatingTypes>& mating_counts() const { return mating_counts_; }
  double case_total() const { return n_case_; }
  double control_total() const { return n_control_; }

 private:
  double constant_ = 0.0;
  std::array<double, kMatingTypes> affected_{};
  std::array<double, kMatingTypes> unaffected_{};
  std::array<double, kMatingTypes> mating_counts_{};
  double n_case_ = 0.0;
  double n_control_ = 0.0;
};

}  // namespace imprint
