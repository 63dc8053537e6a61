#pragma once

// Simulation study: cells of (disease model, scenario, siblings) times
// replicates. Every replicate is persisted as its own record before the
// summary is computed from the records on disk, so interrupted studies
// resume where they stopped.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imprint/inference.hpp"
#include "imprint/io.hpp"
#include "imprint/simulator.hpp"

namespace imprint {

struct Profile {
  std::string name;
  ChainConfig chain;
  long replicates = 0;
};

Profile desk_profile();   // 100 replicates; burn 2000, thin 50, keep 2000
Profile full_profile();  // 500 replicates; burn 10000, thin 500, keep 10000
Profile profile_by_name(const std::string& name);

// Estimate above 20 or below 1/20.
bool classify_wild(double estimate);
double relative_difference(double estimate, double truth);

// Whether the null hypothesis of `kind` is true under disease model 1..8.
bool null_holds(int model, TestKind kind);

// The five relative-risk parameters, the ones flagged wild and summarized.
inline constexpr std::array<Parameter, 5> kRiskParameters = {
    Parameter::kR1, Parameter::kR2, Parameter::kRim, Parameter::kS1, Parameter::kS2};

struct Cell {
  int model = 1;
  int scenario = 1;
  bool with_siblings = false;

  std::string label() const;  // e.g. "m3_s8_nosib"
  auto operator<=>(const Cell&) const = default;
};

struct StudyConfig {
  std::vector<Cell> cells;
  long replicates = 100;
  TestConfig tests;
  std::vector<TestKind> test_kinds{kAllTests.begin(), kAllTests.end()};
  std::uint64_t seed = 1;
  int workers = 1;
  std::filesystem::path out_dir;
  // Applied on top of each cell's standard scenario.
  long n_case = 150;
  long n_control = 150;
  long siblings_per_family = 1;

  void validate() const;
  // Digest of everything that determines a record's content.
  std::uint64_t fingerprint() const;
};

struct TestOutcome {
  TestKind kind = TestKind::kAssociation;
  double statistic = 0.0;
  double p_value = 1.0;
  long df = 0;
  bool clamped = false;
  std::map<double, bool> reject_at;
};

struct ReplicateRecord {
  Cell cell;
  long replicate = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_fingerprint = 0;
  bool ok = false;
  std::string error;
  DiseaseModel truth;
  DiseaseModel estimate;  // unmasked fit at its own stopping point
  bool converged = false;
  long iterations = 0;
  long ascent_violations = 0;
  std::vector<TestOutcome> tests;
  std::map<std::string, bool> wild;

  io::Json to_json() const;
  static ReplicateRecord from_json(const io::Json& j);
};

// Seed of replicate r in `cell`; the data and the fits draw from
// derive_seed(seed, 1) and derive_seed(seed, 2).
std::uint64_t replicate_seed(std::uint64_t master, const Cell& cell, long replicate);

// Simulates and analyses one replicate. Failures are captured in the record.
ReplicateRecord run_replicate(const StudyConfig& cfg, const Cell& cell, long replicate);

struct TestRate {
  Cell cell;
  TestKind kind = TestKind::kAssociation;
  double level = 0.05;
  bool null_true = false;
  long n_ok = 0;
  long n_failed = 0;
  long rejections = 0;
  double rate = 0.0;
};

struct WildRate {
  Cell cell;
  Parameter parameter = Parameter::kR1;
  long n = 0;
  long wild = 0;
  double proportion = 0.0;
};

inline constexpr std::array<double, 7> kBiasQuantiles = {0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0};

struct BiasSummary {
  Cell cell;
  Parameter parameter = Parameter::kR1;
  double truth = 0.0;
  long n_used = 0;  // wild estimates excluded
  std::array<double, kBiasQuantiles.size()> quantiles{};
};

struct SummaryTable {
  std::vector<TestRate> tests;
  std::vector<WildRate> wild;
  std::vector<BiasSummary> bias;
  long failures = 0;
};

// Deterministic, order-independent reduction over records.
SummaryTable summarize(const StudyConfig& cfg, const std::vector<ReplicateRecord>& records);

struct StudyResult {
  std::vector<ReplicateRecord> records;  // cell-major, then replicate
  SummaryTable summary;
  long resumed = 0;  // records reused from an earlier run
};

// Runs every missing replicate with `workers` threads, persisting each record
// under out_dir/records, then writes the summary files. Records whose
// fingerprint matches the configuration are reused.
StudyResult run_study(const StudyConfig& cfg);

// Linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace imprint
