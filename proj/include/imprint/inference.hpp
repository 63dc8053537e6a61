#pragma once

// Likelihood-ratio tests built from a null (masked) and an alternative
// (unmasked) MCEM fit on the same counts.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imprint/mcem.hpp"

namespace imprint {

enum class TestKind { kAssociation, kImprinting, kMaternal };
inline constexpr std::array<TestKind, 3> kAllTests = {TestKind::kAssociation, TestKind::kImprinting,
                                                      TestKind::kMaternal};

const char* test_name(TestKind kind);
TestKind parse_test_kind(const std::string& name);

struct HypothesisSpec {
  TestKind kind = TestKind::kAssociation;
  ParameterMask mask;
  long df = 0;

  // Imprinting fixes rim (df 1), maternal fixes s1, s2 (df 2), association
  // fixes all five risks (df 6, or 5 when sibling trios are present).
  static HypothesisSpec make(TestKind kind, const FamilyCounts& y,
                             std::optional<long> df_override = std::nullopt);
};

enum class StatisticForm {
  kDifference,  // -2 (Q_null - Q_alt)
  kRatio,  // -2 log(Q_null / Q_alt); kept for audits, not chi-square
};

const char* statistic_form_name(StatisticForm form);
StatisticForm parse_statistic_form(const std::string& name);

struct Statistic {
  double value = 0.0;  // clamped at 0
  double raw = 0.0;
  bool clamped = false;
};

// Throws MismatchedData when the fits saw different counts.
Statistic lr_statistic(const McemFit& null_fit, const McemFit& alt_fit, StatisticForm form);

// P(X > x) for X ~ chi-square(df), via the regularized upper incomplete gamma.
double chi_square_upper_tail(double x, double df);

struct FitSummary {
  DiseaseModel theta;
  DirichletParams alpha;
  double q_data_term = 0.0;
  double q_latent_term = 0.0;
  bool converged = false;
  long iterations_used = 0;
  double mean_acceptance = 0.0;
  long ascent_violations = 0;
  std::string mask;
  std::vector<std::string> warnings;

  static FitSummary of(const McemFit& fit);
};

struct TestResult {
  TestKind kind = TestKind::kAssociation;
  StatisticForm form = StatisticForm::kDifference;
  double statistic = 0.0;
  double raw_statistic = 0.0;
  bool clamped = false;
  long df = 0;
  double p_value = 1.0;
  std::map<double, bool> reject_at;
  // Both arms are compared after this many EM iterations.
  long compared_at_iteration = 0;
  FitSummary null_fit;
  FitSummary alt_fit;
  std::vector<std::string> diagnostics;
};

struct TestConfig {
  FitConfig fit;  // its mask is ignored; each arm sets its own
  StatisticForm form = StatisticForm::kDifference;
  std::vector<double> levels{0.05};
  std::optional<long> df_override;
  // Compare both arms after the same number of EM iterations.
  bool align_iterations = true;
};

// Seeds: the alternative arm uses derive_seed(seed, 0) and the null arm of
// test k uses derive_seed(seed, k + 1), k being the TestKind ordinal.
TestResult run_test(const FamilyCounts& y, TestKind kind, const TestConfig& cfg, std::uint64_t seed);

struct TestBattery {
  McemFit alternative;  // unmasked fit at its own stopping point
  std::vector<TestResult> results;
};

// Runs several tests sharing one alternative fit; each result equals the
// corresponding run_test call with the same seed.
TestBattery run_tests(const FamilyCounts& y, const std::vector<TestKind>& kinds,
                      const TestConfig& cfg, std::uint64_t seed);

}  // namespace imprint
