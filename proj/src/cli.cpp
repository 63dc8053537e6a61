#include "imprint/cli.hpp"

#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "imprint/errors.hpp"

namespace imprint::cli {

namespace {

template <class T>
T get_as(const io::Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

ConvergenceRule parse_rule(const std::string& s) {
  if (s == "theta") return ConvergenceRule::kThetaOnly;
  if (s == "joint") return ConvergenceRule::kJoint;
  throw ConfigError("convergence must be 'theta' or 'joint', got '" + s + "'");
}

KernelPolicy parse_kernel(const std::string& s) {
  if (s == "serial") return KernelPolicy::kSerial;
  if (s == "parallel") return KernelPolicy::kParallel;
  throw ConfigError("kernel must be 'serial' or 'parallel', got '" + s + "'");
}

Parameter parameter_named(const std::string& name) {
  Parameter p{};
  if (!parse_parameter(name, p)) {
    throw ConfigError("unknown parameter '" + name + "' (expected delta, r1, r2, rim, s1 or s2)");
  }
  return p;
}

std::pair<Parameter, double> parse_fix(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ConfigError("--fix expects PARAM=VALUE, got '" + s + "'");
  const Parameter p = parameter_named(s.substr(0, eq));
  std::size_t used = 0;
  double v = 0.0;
  const std::string num = s.substr(eq + 1);
  try {
    v = std::stod(num, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (num.empty() || used != num.size()) throw ConfigError("--fix value '" + num + "' is not a number");
  return {p, v};
}

std::vector<bool> parse_sibling_arms(const std::string& s) {
  if (s == "no") return {false};
  if (s == "yes") return {true};
  if (s == "both") return {false, true};
  throw ConfigError("--siblings must be no, yes or both, got '" + s + "'");
}

}  // namespace

void RunConfig::apply_profile(const std::string& name, bool set_replicates) {
  const Profile p = profile_by_name(name);
  profile = p.name;
  chain = p.chain;
  if (set_replicates) replicates = p.replicates;
}

void RunConfig::apply_json(const io::Json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") seed = get_as<std::uint64_t>(v, key);
    else if (key == "profile") apply_profile(get_as<std::string>(v, key), false);
    else if (key == "burn_in") chain.burn_in = get_as<long>(v, key);
    else if (key == "thin") chain.thin = get_as<long>(v, key);
    else if (key == "keep") chain.keep = get_as<long>(v, key);
    else if (key == "replicates") replicates = get_as<long>(v, key);
    else if (key == "max_iterations") max_iterations = get_as<long>(v, key);
    else if (key == "tolerance") tolerance = get_as<double>(v, key);
    else if (key == "convergence") rule = parse_rule(get_as<std::string>(v, key));
    else if (key == "kernel") kernel = parse_kernel(get_as<std::string>(v, key));
    else if (key == "theta_init") theta_init = io::disease_model_from_json(v);
    else if (key == "statistic") statistic = parse_statistic_form(get_as<std::string>(v, key));
    else if (key == "df_override") {
      if (v.is_null()) df_override.reset();
      else df_override = get_as<long>(v, key);
    } else if (key == "levels") levels = get_as<std::vector<double>>(v, key);
    else if (key == "fix") {
      if (!v.is_object()) throw ConfigError("config key 'fix' must be an object");
      for (const auto& [name, value] : v.items()) {
        fix[parameter_named(name)] = get_as<double>(value, "fix." + name);
      }
    } else if (key == "out") out = get_as<std::string>(v, key);
    else if (key == "model") model = get_as<int>(v, key);
    else if (key == "scenario") scenario = get_as<int>(v, key);
    else if (key == "theta") theta = io::disease_model_from_json(v);
    else if (key == "maf") maf = get_as<double>(v, key);
    else if (key == "prev") prev = get_as<double>(v, key);
    else if (key == "hwe") hwe = get_as<bool>(v, key);
    else if (key == "zeta_male") zeta_male = get_as<double>(v, key);
    else if (key == "zeta_female") zeta_female = get_as<double>(v, key);
    else if (key == "n_case") n_case = get_as<long>(v, key);
    else if (key == "n_control") n_control = get_as<long>(v, key);
    else if (key == "with_siblings") with_siblings = get_as<bool>(v, key);
    else if (key == "siblings_per_family") siblings_per_family = get_as<long>(v, key);
    else if (key == "models") models = get_as<std::vector<int>>(v, key);
    else if (key == "scenarios") scenarios = get_as<std::vector<int>>(v, key);
    else if (key == "siblings") siblings = get_as<std::vector<bool>>(v, key);
    else if (key == "workers") workers = get_as<int>(v, key);
    else if (key == "tests") {
      tests.clear();
      for (const auto& name : get_as<std::vector<std::string>>(v, key)) tests.push_back(parse_test_kind(name));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

FitConfig RunConfig::fit_config() const {
  FitConfig f;
  f.chain = chain;
  f.chain.seed = seed;
  f.max_iterations = max_iterations;
  f.tolerance = tolerance;
  f.rule = rule;
  f.theta_init = theta_init;
  f.kernel_policy = kernel;
  for (const auto& [p, v] : fix) f.mask.fix(p, v);
  return f;
}

TestConfig RunConfig::test_config() const {
  TestConfig t;
  t.fit = fit_config();
  t.fit.mask = ParameterMask::none();
  t.form = statistic;
  t.levels = levels;
  t.df_override = df_override;
  return t;
}

ScenarioConfig RunConfig::scenario_config() const {
  ScenarioConfig s = ScenarioConfig::standard(scenario);
  if (maf) s.maf = *maf;
  if (prev) s.prev = *prev;
  if (hwe) s.hwe = *hwe;
  if (zeta_male) s.zeta_male = *zeta_male;
  if (zeta_female) s.zeta_female = *zeta_female;
  s.n_case = n_case;
  s.n_control = n_control;
  s.with_siblings = with_siblings;
  s.siblings_per_family = siblings_per_family;
  s.validate();
  return s;
}

StudyConfig RunConfig::study_config() const {
  StudyConfig s;
  for (int m : models) {
    for (int sc : scenarios) {
      for (bool sib : siblings) s.cells.push_back(Cell{m, sc, sib});
    }
  }
  s.replicates = replicates;
  s.tests = test_config();
  s.test_kinds = tests;
  s.seed = seed;
  s.workers = workers;
  s.out_dir = out;
  s.n_case = n_case;
  s.n_control = n_control;
  s.siblings_per_family = siblings_per_family;
  return s;
}

namespace {

io::Json settings_json(const RunConfig& c) {
  io::Json fixed = io::Json::object();
  for (const auto& [p, v] : c.fix) fixed[std::string(parameter_name(p))] = v;
  return io::Json{{"seed", c.seed},
                  {"profile", c.profile},
                  {"burn_in", c.chain.burn_in},
                  {"thin", c.chain.thin},
                  {"keep", c.chain.keep},
                  {"max_iterations", c.max_iterations},
                  {"tolerance", c.tolerance},
                  {"convergence", c.rule == ConvergenceRule::kJoint ? "joint" : "theta"},
                  {"fix", fixed}};
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  if (c.out.empty()) throw ConfigError("simulate needs --out DIR");
  if (c.replicates < 1) throw ConfigError("replicates must be >= 1");
  const ScenarioConfig scenario = c.scenario_config();
  DiseaseModel theta;
  if (c.theta) {
    theta = *c.theta;
    if (!theta.has_valid_domain() || !validate_penetrance_bounds(theta)) {
      throw ConfigError("explicit theta is outside the feasible region");
    }
  } else {
    theta = calibrated_model(c.model, scenario);
  }
  const Cell cell{c.model, c.scenario, scenario.with_siblings};
  io::Json files = io::Json::array();
  for (long r = 0; r < c.replicates; ++r) {
    const std::uint64_t seed = replicate_seed(c.seed, cell, r);
    Rng rng(derive_seed(seed, 1));
    const FamilyCounts y = simulate_dataset(theta, scenario, rng);
    const std::string name = "counts_r" + std::to_string(r) + ".tsv";
    io::write_counts_file(c.out / name, y);
    files.push_back(io::Json{{"replicate", r}, {"seed", seed}, {"file", name}});
  }
  io::Json manifest{{"seed", c.seed},
                    {"model", c.theta ? io::Json(nullptr) : io::Json(c.model)},
                    {"scenario", c.scenario},
                    {"maf", scenario.maf},
                    {"prev", scenario.prev},
                    {"hwe", scenario.hwe},
                    {"zeta_male", scenario.zeta_male},
                    {"zeta_female", scenario.zeta_female},
                    {"n_case", scenario.n_case},
                    {"n_control", scenario.n_control},
                    {"with_siblings", scenario.with_siblings},
                    {"siblings_per_family", scenario.siblings_per_family},
                    {"theta", io::to_json(theta)},
                    {"calibrated_delta", theta.delta},
                    {"files", files}};
  io::write_file_atomic(c.out / "manifest.json", io::dump(manifest));
  out << "wrote " << c.replicates << " counts file(s) to " << c.out.string() << " (delta = " << theta.delta
      << ")\n";
  return 0;
}

int cmd_fit(const RunConfig& c, const std::string& counts_path, std::ostream& out) {
  const FamilyCounts y = io::read_counts_file(counts_path);
  const McemFit f = fit(y, c.fit_config(), c.seed);
  const std::string text = io::fit_report_text(f);
  out << text;
  if (!c.out.empty()) {
    io::Json report = io::fit_report(f);
    report["settings"] = settings_json(c);
    io::write_file_atomic(c.out / "fit.json", io::dump(report));
    io::write_file_atomic(c.out / "fit.txt", text);
  }
  return 0;
}

int cmd_test(const RunConfig& c, const std::string& counts_path, std::ostream& out) {
  const FamilyCounts y = io::read_counts_file(counts_path);
  const TestBattery b = run_tests(y, c.tests, c.test_config(), c.seed);
  const std::string text = io::test_report_text(b.results);
  out << text;
  if (!c.out.empty()) {
    io::Json results = io::Json::array();
    for (const auto& r : b.results) results.push_back(io::to_json(r));
    io::Json report{{"settings", settings_json(c)},
                    {"statistic_form", statistic_form_name(c.statistic)},
                    {"alternative", io::to_json(FitSummary::of(b.alternative))},
                    {"tests", results}};
    io::write_file_atomic(c.out / "test.json", io::dump(report));
    io::write_file_atomic(c.out / "test.txt", text);
  }
  return 0;
}

int cmd_experiment(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.out.empty()) throw ConfigError("experiment needs --out DIR");
  const StudyConfig study = c.study_config();
  const StudyResult result = run_study(study);
  out << "cells: " << study.cells.size() << ", replicates per cell: " << study.replicates
      << ", reused records: " << result.resumed << ", failures: " << result.summary.failures << '\n';
  for (const auto& t : result.summary.tests) {
    out << t.cell.label() << '\t' << test_name(t.kind) << "\tlevel " << t.level << '\t'
        << (t.null_true ? "type I error " : "power ") << t.rate << " (" << t.rejections << "/" << t.n_ok
        << ")\n";
  }
  if (result.summary.failures > 0) {
    err << "warning: " << result.summary.failures << " replicate(s) failed; see "
        << (study.out_dir / "failures.tsv").string() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MCEM estimation and tests of imprinting and maternal effects from trio counts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "imprint 1.0");

  struct Flags {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    std::string profile;
    std::vector<std::string> fix;
    std::string statistic;
    long df_override = 0;
    long max_iterations = 0;
    double tolerance = 0.0;
    long burn_in = 0, thin = 0, keep = 0;
    std::string convergence;
    std::string kernel;
    std::vector<double> levels;
    int model = 0, scenario = 0;
    long replicates = 0;
    bool siblings_flag = false;
    std::string siblings_arms;
    long n_case = 0, n_control = 0;
    std::vector<int> models, scenarios;
    int workers = 0;
    std::vector<std::string> tests;
    std::string counts;
  } f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--profile", f.profile, "chain sizes: desk or full")
                          ->check(CLI::IsMember({"desk", "full"}));
    sub->add_option("--max-iterations", f.max_iterations, "EM iteration cap");
    sub->add_option("--tolerance", f.tolerance, "convergence tolerance");
    sub->add_option("--burn-in", f.burn_in, "discarded chain states");
    sub->add_option("--thin", f.thin, "gap between kept states");
    sub->add_option("--keep", f.keep, "kept states per iteration");
    sub->add_option("--convergence", f.convergence, "theta or joint")
                              ->check(CLI::IsMember({"theta", "joint"}));
    sub->add_option("--kernel", f.kernel, "serial or parallel")
                         ->check(CLI::IsMember({"serial", "parallel"}));
  };
  auto testing = [&](CLI::App* sub) {
    sub->add_option("--statistic", f.statistic, "difference or ratio")
                            ->check(CLI::IsMember({"difference", "ratio"}));
    sub->add_option("--df-override", f.df_override, "degrees of freedom for every test");
    sub->add_option("--levels", f.levels, "significance levels")->delimiter(',');
    sub->add_option("--tests", f.tests, "association,imprinting,maternal")->delimiter(',');
  };

  auto* sim = app.add_subcommand("simulate", "simulate trio counts files");
  common(sim);
  sim->add_option("--model", f.model, "disease model 1-8");
  sim->add_option("--scenario", f.scenario, "scenario 1-8");
  sim->add_option("--replicates", f.replicates, "number of datasets");
  sim->add_flag("--siblings", f.siblings_flag, "add sibling trios");
  sim->add_option("--n-case", f.n_case, "case trios per dataset");
  sim->add_option("--n-control", f.n_control, "control trios per dataset");

  auto* fit_cmd = app.add_subcommand("fit", "fit the MCEM model to a counts file");
  common(fit_cmd);
  fit_cmd->add_option("--fix", f.fix, "pin PARAM=VALUE (repeatable)");
  fit_cmd->add_option("counts", f.counts, "counts file")->required()->check(CLI::ExistingFile);

  auto* test_cmd = app.add_subcommand("test", "likelihood-ratio tests on a counts file");
  common(test_cmd);
  testing(test_cmd);
  test_cmd->add_option("counts", f.counts, "counts file")->required()->check(CLI::ExistingFile);

  auto* exp_cmd = app.add_subcommand("experiment", "simulation study over models x scenarios");
  common(exp_cmd);
  testing(exp_cmd);
  exp_cmd->add_option("--models", f.models, "disease models")->delimiter(',');
  exp_cmd->add_option("--scenarios", f.scenarios, "scenarios")->delimiter(',');
  exp_cmd->add_option("--siblings", f.siblings_arms, "no, yes or both");
  exp_cmd->add_option("--replicates", f.replicates, "replicates per cell");
  exp_cmd->add_option("--workers", f.workers, "parallel replicates");
  exp_cmd->add_option("--n-case", f.n_case, "case trios per dataset");
  exp_cmd->add_option("--n-control", f.n_control, "control trios per dataset");

  // CLI11 keeps one Option per subcommand; look up the one that was parsed.
  auto given = [&](CLI::App* sub, const std::string& name) {
    const auto* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    RunConfig c;
    io::Json file = io::Json::object();
    if (given(sub, "--config")) {
      try {
        file = io::Json::parse(io::read_file(f.config));
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("cannot parse " + f.config + ": " + e.what());
      }
      if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
    }
    std::string profile = "desk";
    if (file.contains("profile")) profile = get_as<std::string>(file["profile"], "profile");
    if (given(sub, "--profile")) profile = f.profile;
    c.apply_profile(profile, name == "experiment");
    file.erase("profile");
    c.apply_json(file);

    if (given(sub, "--seed")) c.seed = f.seed;
    if (given(sub, "--out")) c.out = f.out;
    if (given(sub, "--max-iterations")) c.max_iterations = f.max_iterations;
    if (given(sub, "--tolerance")) c.tolerance = f.tolerance;
    if (given(sub, "--burn-in")) c.chain.burn_in = f.burn_in;
    if (given(sub, "--thin")) c.chain.thin = f.thin;
    if (given(sub, "--keep")) c.chain.keep = f.keep;
    if (given(sub, "--convergence")) c.rule = parse_rule(f.convergence);
    if (given(sub, "--kernel")) c.kernel = parse_kernel(f.kernel);
    if (given(sub, "--statistic")) c.statistic = parse_statistic_form(f.statistic);
    if (given(sub, "--df-override")) c.df_override = f.df_override;
    if (given(sub, "--levels")) c.levels = f.levels;
    if (given(sub, "--tests")) {
      c.tests.clear();
      for (const auto& t : f.tests) c.tests.push_back(parse_test_kind(t));
    }
    if (given(sub, "--fix")) {
      for (const auto& s : f.fix) {
        const auto [p, v] = parse_fix(s);
        c.fix[p] = v;
      }
    }
    if (given(sub, "--model")) c.model = f.model;
    if (given(sub, "--scenario")) c.scenario = f.scenario;
    if (given(sub, "--replicates")) c.replicates = f.replicates;
    if (name == "simulate" && given(sub, "--siblings")) c.with_siblings = f.siblings_flag;
    if (name == "experiment" && given(sub, "--siblings")) c.siblings = parse_sibling_arms(f.siblings_arms);
    if (given(sub, "--n-case")) c.n_case = f.n_case;
    if (given(sub, "--n-control")) c.n_control = f.n_control;
    if (given(sub, "--models")) c.models = f.models;
    if (given(sub, "--scenarios")) c.scenarios = f.scenarios;
    if (given(sub, "--workers")) c.workers = f.workers;
    c.chain.validate();

    if (name == "simulate") return cmd_simulate(c, out);
    if (name == "fit") return cmd_fit(c, f.counts, out);
    if (name == "test") return cmd_test(c, f.counts, out);
    return cmd_experiment(c, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace imprint::cli
