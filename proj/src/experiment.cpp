#include "imprint/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <omp.h>

#include "imprint/errors.hpp"

namespace imprint {

Profile desk_profile() { return Profile{"desk", ChainConfig{2000, 50, 2000, 1}, 100}; }

Profile full_profile() { return Profile{"full", ChainConfig{10000, 500, 10000, 1}, 500}; }

Profile profile_by_name(const std::string& name) {
  if (name == "desk") return desk_profile();
  if (name == "full") return full_profile();
  throw ConfigError("unknown profile '" + name + "' (expected desk or full)");
}

bool classify_wild(double estimate) { return estimate > 20.0 || estimate < 1.0 / 20.0; }

double relative_difference(double estimate, double truth) {
  if (!(truth > 0.0)) throw ConfigError("relative difference needs a positive true value");
  return (estimate - truth) / truth;
}

bool null_holds(int model, TestKind kind) {
  if (model < 1 || model > kDiseaseModels) {
    throw ConfigError("disease model index must be in 1..8, got " + std::to_string(model));
  }
  const DiseaseModel r = disease_model_risks(model);
  switch (kind) {
    case TestKind::kAssociation:
      return r.r1 == 1.0 && r.r2 == 1.0 && r.rim == 1.0 && r.s1 == 1.0 && r.s2 == 1.0;
    case TestKind::kImprinting: return r.rim == 1.0;
    case TestKind::kMaternal: return r.s1 == 1.0 && r.s2 == 1.0;
  }
  return false;
}

std::string Cell::label() const {
  return "m" + std::to_string(model) + "_s" + std::to_string(scenario) +
         (with_siblings ? "_sib" : "_nosib");
}

void StudyConfig::validate() const {
  if (cells.empty()) throw ConfigError("study needs at least one cell");
  std::set<Cell> seen;
  for (const auto& c : cells) {
    if (c.model < 1 || c.model > kDiseaseModels) {
      throw ConfigError("disease model index must be in 1..8, got " + std::to_string(c.model));
    }
    if (c.scenario < 1 || c.scenario > kScenarios) {
      throw ConfigError("scenario index must be in 1..8, got " + std::to_string(c.scenario));
    }
    if (!seen.insert(c).second) throw ConfigError("duplicate cell " + c.label());
  }
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (test_kinds.empty()) throw ConfigError("study needs at least one test");
  if (out_dir.empty()) throw ConfigError("study needs an output directory");
  if (n_case < 1 || n_control < 1) throw ConfigError("n_case and n_control must be >= 1");
  if (siblings_per_family < 1) throw ConfigError("siblings_per_family must be >= 1");
  tests.fit.chain.validate();
  for (double level : tests.levels) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("significance levels must lie in (0, 1)");
  }
}

std::uint64_t StudyConfig::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  const auto& f = tests.fit;
  os << f.chain.burn_in << ' ' << f.chain.thin << ' ' << f.chain.keep << ' ' << f.max_iterations
     << ' ' << f.tolerance << ' ' << static_cast<int>(f.rule);
  for (double v : f.theta_init.as_array()) os << ' ' << v;
  os << ' ' << static_cast<int>(tests.form) << ' ' << tests.df_override.value_or(-1) << ' '
     << tests.align_iterations;
  for (double l : tests.levels) os << ' ' << l;
  for (auto k : test_kinds) os << ' ' << static_cast<int>(k);
  os << ' ' << seed << ' ' << n_case << ' ' << n_control << ' ' << siblings_per_family;
  const std::string s = os.str();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

io::Json ReplicateRecord::to_json() const {
  io::Json tj = io::Json::array();
  for (const auto& t : tests) {
    io::Json decisions = io::Json::array();
    for (const auto& [level, reject] : t.reject_at) {
      decisions.push_back(io::Json{{"level", level}, {"reject", reject}});
    }
    tj.push_back(io::Json{{"test", test_name(t.kind)},
                          {"statistic", t.statistic},
                          {"p_value", t.p_value},
                          {"df", t.df},
                          {"clamped", t.clamped},
                          {"decisions", decisions}});
  }
  io::Json wj = io::Json::object();
  for (const auto& [name, flag] : wild) wj[name] = flag;
  return io::Json{{"model", cell.model},
                  {"scenario", cell.scenario},
                  {"with_siblings", cell.with_siblings},
                  {"replicate", replicate},
                  {"seed", seed},
                  {"config_fingerprint", config_fingerprint},
                  {"ok", ok},
                  {"error", error},
                  {"truth", io::to_json(truth)},
                  {"estimate", io::to_json(estimate)},
                  {"converged", converged},
                  {"iterations", iterations},
                  {"ascent_violations", ascent_violations},
                  {"tests", tj},
                  {"wild", wj}};
}

ReplicateRecord ReplicateRecord::from_json(const io::Json& j) {
  ReplicateRecord r;
  try {
    r.cell.model = j.at("model").get<int>();
    r.cell.scenario = j.at("scenario").get<int>();
    r.cell.with_siblings = j.at("with_siblings").get<bool>();
    r.replicate = j.at("replicate").get<long>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_fingerprint = j.at("config_fingerprint").get<std::uint64_t>();
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.truth = io::disease_model_from_json(j.at("truth"));
    r.estimate = io::disease_model_from_json(j.at("estimate"));
    r.converged = j.at("converged").get<bool>();
    r.iterations = j.at("iterations").get<long>();
    r.ascent_violations = j.at("ascent_violations").get<long>();
    for (const auto& t : j.at("tests")) {
      TestOutcome o;
      o.kind = parse_test_kind(t.at("test").get<std::string>());
      o.statistic = t.at("statistic").get<double>();
      o.p_value = t.at("p_value").get<double>();
      o.df = t.at("df").get<long>();
      o.clamped = t.at("clamped").get<bool>();
      for (const auto& d : t.at("decisions")) o.reject_at[d.at("level").get<double>()] = d.at("reject").get<bool>();
      r.tests.push_back(std::move(o));
    }
    for (const auto& [name, flag] : j.at("wild").items()) r.wild[name] = flag.get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed replicate record: ") + e.what());
  }
  return r;
}

std::uint64_t replicate_seed(std::uint64_t master, const Cell& cell, long replicate) {
  return derive_seed(master, static_cast<std::uint64_t>(cell.model),
                     static_cast<std::uint64_t>(cell.scenario),
                     static_cast<std::uint64_t>(cell.with_siblings),
                     static_cast<std::uint64_t>(replicate));
}

namespace {

ScenarioConfig cell_scenario(const StudyConfig& cfg, const Cell& cell) {
  ScenarioConfig s = ScenarioConfig::standard(cell.scenario);
  s.n_case = cfg.n_case;
  s.n_control = cfg.n_control;
  s.with_siblings = cell.with_siblings;
  s.siblings_per_family = cfg.siblings_per_family;
  return s;
}

std::filesystem::path record_path(const StudyConfig& cfg, const Cell& cell, long replicate) {
  return cfg.out_dir / "records" / (cell.label() + "_r" + std::to_string(replicate) + ".json");
}

std::optional<ReplicateRecord> load_record(const StudyConfig& cfg, const Cell& cell, long replicate) {
  const auto path = record_path(cfg, cell, replicate);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    auto rec = ReplicateRecord::from_json(io::Json::parse(io::read_file(path)));
    if (rec.cell == cell && rec.replicate == replicate &&
        rec.config_fingerprint == cfg.fingerprint()) {
      return rec;
    }
  } catch (const std::exception&) {
    // Unreadable or partial records are recomputed.
  }
  return std::nullopt;
}

}  // namespace

ReplicateRecord run_replicate(const StudyConfig& cfg, const Cell& cell, long replicate) {
  ReplicateRecord rec;
  rec.cell = cell;
  rec.replicate = replicate;
  rec.seed = replicate_seed(cfg.seed, cell, replicate);
  rec.config_fingerprint = cfg.fingerprint();
  try {
    const ScenarioConfig scenario = cell_scenario(cfg, cell);
    rec.truth = calibrated_model(cell.model, scenario);
    Rng rng(derive_seed(rec.seed, 1));
    const FamilyCounts y = simulate_dataset(rec.truth, scenario, rng);
    const TestBattery battery = run_tests(y, cfg.test_kinds, cfg.tests, derive_seed(rec.seed, 2));
    rec.estimate = battery.alternative.psi.theta;
    rec.converged = battery.alternative.converged;
    rec.iterations = battery.alternative.iterations_used;
    rec.ascent_violations = battery.alternative.ascent_violations();
    for (const auto& r : battery.results) {
      // The alternative summary is the (possibly extended) shared fit, so
      // only the null arms add new iterations to the ascent count.
      rec.ascent_violations += r.null_fit.ascent_violations;
      rec.tests.push_back(TestOutcome{r.kind, r.statistic, r.p_value, r.df, r.clamped, r.reject_at});
    }
    for (auto p : kRiskParameters) {
      rec.wild[std::string(parameter_name(p))] = classify_wild(rec.estimate.get(p));
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
    rec.tests.clear();
    rec.wild.clear();
  }
  return rec;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

SummaryTable summarize(const StudyConfig& cfg, const std::vector<ReplicateRecord>& records) {
  SummaryTable out;
  std::map<Cell, std::vector<const ReplicateRecord*>> by_cell;
  for (const auto& r : records) by_cell[r.cell].push_back(&r);
  for (auto& [cell, recs] : by_cell) {
    std::sort(recs.begin(), recs.end(),
              [](const ReplicateRecord* a, const ReplicateRecord* b) { return a->replicate < b->replicate; });
  }

  for (const auto& cell : cfg.cells) {
    const auto& recs = by_cell[cell];
    long failed = 0;
    for (const auto* r : recs) failed += r->ok ? 0 : 1;
    out.failures += failed;

    for (auto kind : cfg.test_kinds) {
      for (double level : cfg.tests.levels) {
        TestRate t;
        t.cell = cell;
        t.kind = kind;
        t.level = level;
        t.null_true = null_holds(cell.model, kind);
        t.n_failed = failed;
        for (const auto* r : recs) {
          if (!r->ok) continue;
          for (const auto& o : r->tests) {
            if (o.kind != kind) continue;
            ++t.n_ok;
            const auto it = o.reject_at.find(level);
            if (it != o.reject_at.end() && it->second) ++t.rejections;
          }
        }
        t.rate = t.n_ok > 0 ? static_cast<double>(t.rejections) / static_cast<double>(t.n_ok)
                            : std::numeric_limits<double>::quiet_NaN();
        out.tests.push_back(t);
      }
    }

    for (auto p : kRiskParameters) {
      WildRate w;
      w.cell = cell;
      w.parameter = p;
      BiasSummary b;
      b.cell = cell;
      b.parameter = p;
      b.truth = disease_model_risks(cell.model).get(p);
      std::vector<double> diffs;
      for (const auto* r : recs) {
        if (!r->ok) continue;
        ++w.n;
        const double est = r->estimate.get(p);
        if (classify_wild(est)) {
          ++w.wild;
        } else {
          diffs.push_back(relative_difference(est, b.truth));
        }
      }
      w.proportion = w.n > 0 ? static_cast<double>(w.wild) / static_cast<double>(w.n)
                             : std::numeric_limits<double>::quiet_NaN();
      std::sort(diffs.begin(), diffs.end());
      b.n_used = static_cast<long>(diffs.size());
      for (std::size_t i = 0; i < kBiasQuantiles.size(); ++i) {
        b.quantiles[i] = quantile_sorted(diffs, kBiasQuantiles[i]);
      }
      out.wild.push_back(w);
      out.bias.push_back(b);
    }
  }
  return out;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "NA";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string cell_columns(const Cell& c) {
  return std::to_string(c.model) + "\t" + std::to_string(c.scenario) + "\t" +
         (c.with_siblings ? "1" : "0");
}

io::Json cell_json(const Cell& c) {
  return io::Json{{"model", c.model}, {"scenario", c.scenario}, {"with_siblings", c.with_siblings}};
}

void write_summary_files(const StudyConfig& cfg, const std::vector<ReplicateRecord>& records,
                         const SummaryTable& s) {
  std::ostringstream tests;
  tests << "model\tscenario\tsiblings\ttest\tlevel\tnull_true\tkind\tn_ok\tn_failed\trejections\trate\n";
  io::Json jtests = io::Json::array();
  for (const auto& t : s.tests) {
    tests << cell_columns(t.cell) << '\t' << test_name(t.kind) << '\t' << num(t.level) << '\t'
          << (t.null_true ? 1 : 0) << '\t' << (t.null_true ? "type_I_error" : "power") << '\t'
          << t.n_ok << '\t' << t.n_failed << '\t' << t.rejections << '\t' << num(t.rate) << '\n';
    jtests.push_back(io::Json{{"cell", cell_json(t.cell)},
                              {"test", test_name(t.kind)},
                              {"level", t.level},
                              {"null_true", t.null_true},
                              {"n_ok", t.n_ok},
                              {"n_failed", t.n_failed},
                              {"rejections", t.rejections},
                              {"rate", t.rate}});
  }

  std::ostringstream wild;
  wild << "model\tscenario\tsiblings\tparameter\tn\twild\tproportion\n";
  io::Json jwild = io::Json::array();
  for (const auto& w : s.wild) {
    wild << cell_columns(w.cell) << '\t' << parameter_name(w.parameter) << '\t' << w.n << '\t'
         << w.wild << '\t' << num(w.proportion) << '\n';
    jwild.push_back(io::Json{{"cell", cell_json(w.cell)},
                             {"parameter", std::string(parameter_name(w.parameter))},
                             {"n", w.n},
                             {"wild", w.wild},
                             {"proportion", w.proportion}});
  }

  std::ostringstream bias;
  bias << "model\tscenario\tsiblings\tparameter\ttruth\tn_used";
  for (double q : kBiasQuantiles) bias << "\tq" << num(q);
  bias << '\n';
  io::Json jbias = io::Json::array();
  for (const auto& b : s.bias) {
    bias << cell_columns(b.cell) << '\t' << parameter_name(b.parameter) << '\t' << num(b.truth) << '\t'
         << b.n_used;
    io::Json qs = io::Json::array();
    for (double q : b.quantiles) {
      bias << '\t' << num(q);
      qs.push_back(q);
    }
    bias << '\n';
    jbias.push_back(io::Json{{"cell", cell_json(b.cell)},
                             {"parameter", std::string(parameter_name(b.parameter))},
                             {"truth", b.truth},
                             {"n_used", b.n_used},
                             {"probabilities", kBiasQuantiles},
                             {"quantiles", qs}});
  }

  // One row per replicate and parameter, for external boxplots.
  std::ostringstream longb;
  longb << "model\tscenario\tsiblings\treplicate\tparameter\ttruth\testimate\trelative_difference\twild\n";
  std::ostringstream failures;
  failures << "model\tscenario\tsiblings\treplicate\terror\n";
  for (const auto& r : records) {
    if (!r.ok) {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      std::replace(msg.begin(), msg.end(), '\t', ' ');
      failures << cell_columns(r.cell) << '\t' << r.replicate << '\t' << msg << '\n';
      continue;
    }
    for (auto p : kRiskParameters) {
      const double truth = r.truth.get(p);
      const double est = r.estimate.get(p);
      longb << cell_columns(r.cell) << '\t' << r.replicate << '\t' << parameter_name(p) << '\t'
            << num(truth) << '\t' << num(est) << '\t' << num(relative_difference(est, truth)) << '\t'
            << (classify_wild(est) ? 1 : 0) << '\n';
    }
  }

  io::Json summary{{"replicates", cfg.replicates},
                   {"seed", cfg.seed},
                   {"failures", s.failures},
                   {"tests", jtests},
                   {"wild", jwild},
                   {"bias", jbias}};
  io::write_file_atomic(cfg.out_dir / "summary_tests.tsv", tests.str());
  io::write_file_atomic(cfg.out_dir / "summary_wild.tsv", wild.str());
  io::write_file_atomic(cfg.out_dir / "summary_bias.tsv", bias.str());
  io::write_file_atomic(cfg.out_dir / "bias_long.tsv", longb.str());
  io::write_file_atomic(cfg.out_dir / "failures.tsv", failures.str());
  io::write_file_atomic(cfg.out_dir / "summary.json", io::dump(summary));
}

}  // namespace

StudyResult run_study(const StudyConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir / "records");

  struct Task {
    Cell cell;
    long replicate;
  };
  std::vector<Task> pending;
  StudyResult result;
  for (const auto& cell : cfg.cells) {
    for (long r = 0; r < cfg.replicates; ++r) {
      if (load_record(cfg, cell, r)) {
        ++result.resumed;
      } else {
        pending.push_back(Task{cell, r});
      }
    }
  }

  std::vector<double> seconds(pending.size(), 0.0);
  std::vector<std::string> write_errors(pending.size());
  const auto n = static_cast<long>(pending.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.workers)
  for (long i = 0; i < n; ++i) {
    const auto& task = pending[static_cast<std::size_t>(i)];
    const auto start = std::chrono::steady_clock::now();
    const ReplicateRecord rec = run_replicate(cfg, task.cell, task.replicate);
    try {
      io::write_file_atomic(record_path(cfg, task.cell, task.replicate), io::dump(rec.to_json()));
    } catch (const std::exception& e) {
      write_errors[static_cast<std::size_t>(i)] = e.what();
    }
    seconds[static_cast<std::size_t>(i)] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  for (const auto& e : write_errors) {
    if (!e.empty()) throw ConfigError("could not persist a replicate record: " + e);
  }

  // Wall times are not reproducible, so they live apart from the records.
  std::ostringstream timings;
  timings << "model\tscenario\tsiblings\treplicate\tseconds\n";
  for (std::size_t i = 0; i < pending.size(); ++i) {
    timings << cell_columns(pending[i].cell) << '\t' << pending[i].replicate << '\t' << seconds[i] << '\n';
  }
  io::write_file_atomic(cfg.out_dir / "timings.tsv", timings.str());

  for (const auto& cell : cfg.cells) {
    for (long r = 0; r < cfg.replicates; ++r) {
      auto rec = load_record(cfg, cell, r);
      if (!rec) throw ConfigError("replicate record " + record_path(cfg, cell, r).string() + " is unreadable");
      result.records.push_back(std::move(*rec));
    }
  }
  result.summary = summarize(cfg, result.records);
  write_summary_files(cfg, result.records, result.summary);
  return result;
}

}  // namespace imprint
