#pragma once

// Command-line front end: simulate, fit, test and experiment subcommands.
//
// Settings come from built-in defaults, then the selected profile, then a
// JSON config file (--config), then explicit flags. Unknown config keys are
// rejected.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imprint/experiment.hpp"
#include "imprint/io.hpp"

namespace imprint::cli {

struct RunConfig {
  std::uint64_t seed = 1;
  std::string profile = "desk";
  ChainConfig chain = desk_profile().chain;
  long replicates = 1;
  long max_iterations = 200;
  double tolerance = 0.01;
  ConvergenceRule rule = ConvergenceRule::kThetaOnly;
  KernelPolicy kernel = KernelPolicy::kSerial;
  DiseaseModel theta_init = DiseaseModel::null_model(0.0067);
  StatisticForm statistic = StatisticForm::kDifference;
  std::optional<long> df_override;
  std::vector<double> levels{0.05};
  std::map<Parameter, double> fix;
  std::filesystem::path out;

  // simulate
  int model = 1;
  int scenario = 1;
  std::optional<DiseaseModel> theta;  // explicit model, bypasses calibration
  // Replace the standard scenario's population fields when set.
  std::optional<double> maf;
  std::optional<double> prev;
  std::optional<bool> hwe;
  std::optional<double> zeta_male;
  std::optional<double> zeta_female;

  // experiment
  std::vector<int> models{1};
  std::vector<int> scenarios{1};
  std::vector<bool> siblings{false};
  int workers = 1;
  std::vector<TestKind> tests{kAllTests.begin(), kAllTests.end()};

  bool with_siblings = false;
  long siblings_per_family = 1;
  long n_case = 150;
  long n_control = 150;

  void apply_profile(const std::string& name, bool set_replicates);
  // Throws ConfigError on unknown keys or values of the wrong type.
  void apply_json(const io::Json& j);

  FitConfig fit_config() const;
  TestConfig test_config() const;
  ScenarioConfig scenario_config() const;
  StudyConfig study_config() const;
};

// Exit codes: 0 success, 1 error, 2 usage error, 3 study finished with
// failed replicates.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace imprint::cli
