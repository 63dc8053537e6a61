#include "imprint/inference.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "imprint/errors.hpp"

namespace imprint {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

const char* test_name(TestKind kind) {
  switch (kind) {
    case TestKind::kAssociation: return "association";
    case TestKind::kImprinting: return "imprinting";
    case TestKind::kMaternal: return "maternal";
  }
  return "?";
}

TestKind parse_test_kind(const std::string& name) {
  const std::string n = lower(name);
  for (auto k : kAllTests) {
    if (n == test_name(k)) return k;
  }
  throw ConfigError("unknown test '" + name + "' (expected association, imprinting or maternal)");
}

HypothesisSpec HypothesisSpec::make(TestKind kind, const FamilyCounts& y,
                                    std::optional<long> df_override) {
  HypothesisSpec spec;
  spec.kind = kind;
  switch (kind) {
    case TestKind::kImprinting:
      spec.mask = ParameterMask::imprinting_null();
      spec.df = 1;
      break;
    case TestKind::kMaternal:
      spec.mask = ParameterMask::maternal_null();
      spec.df = 2;
      break;
    case TestKind::kAssociation:
      spec.mask = ParameterMask::association_null();
      // Without siblings delta drops out of the conditional likelihood under
      // the null, so it is not counted as a constrained parameter.
      spec.df = y.has_siblings() ? 5 : 6;
      break;
  }
  if (df_override) {
    if (*df_override < 1) throw ConfigError("df override must be >= 1");
    spec.df = *df_override;
  }
  return spec;
}

const char* statistic_form_name(StatisticForm form) {
  return form == StatisticForm::kDifference ? "difference" : "ratio";
}

StatisticForm parse_statistic_form(const std::string& name) {
  const std::string n = lower(name);
  if (n == "difference") return StatisticForm::kDifference;
  if (n == "ratio" || n == "log_ratio") return StatisticForm::kRatio;
  throw ConfigError("unknown statistic form '" + name + "' (expected difference or ratio)");
}

Statistic lr_statistic(const McemFit& null_fit, const McemFit& alt_fit, StatisticForm form) {
  if (null_fit.data_fingerprint != alt_fit.data_fingerprint) {
    throw MismatchedData("null and alternative fits were computed on different family counts");
  }
  Statistic s;
  if (form == StatisticForm::kDifference) {
    s.raw = -2.0 * (null_fit.q_data_term - alt_fit.q_data_term);
  } else {
    s.raw = -2.0 * std::log(null_fit.q_data_term / alt_fit.q_data_term);
  }
  s.clamped = !(s.raw >= 0.0);
  s.value = s.clamped ? 0.0 : s.raw;
  return s;
}

double chi_square_upper_tail(double x, double df) {
  if (!(df > 0.0)) throw ConfigError("chi-square df must be positive");
  if (std::isnan(x)) throw ConfigError("chi-square statistic is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

FitSummary FitSummary::of(const McemFit& fit) {
  FitSummary s;
  s.theta = fit.psi.theta;
  s.alpha = fit.psi.alpha;
  s.q_data_term = fit.q_data_term;
  s.q_latent_term = fit.q_latent_term;
  s.converged = fit.converged;
  s.iterations_used = fit.iterations_used;
  for (double r : fit.acceptance_rates) s.mean_acceptance += r;
  if (!fit.acceptance_rates.empty()) {
    s.mean_acceptance /= static_cast<double>(fit.acceptance_rates.size());
  }
  s.ascent_violations = fit.ascent_violations();
  s.mask = fit.mask.describe();
  s.warnings = fit.warnings;
  return s;
}

namespace {

std::uint64_t null_seed(std::uint64_t seed, TestKind kind) {
  return derive_seed(seed, static_cast<std::uint64_t>(kind) + 1);
}

McemFit fit_arm(const FamilyCounts& y, FitConfig cfg, const ParameterMask& mask, std::uint64_t seed,
                const char* arm) {
  cfg.mask = mask;
  try {
    return fit(y, cfg, seed);
  } catch (const Error& e) {
    throw FitError(std::string(arm) + " arm", e.what());
  }
}

}  // namespace

TestBattery run_tests(const FamilyCounts& y, const std::vector<TestKind>& kinds,
                      const TestConfig& cfg, std::uint64_t seed) {
  y.validate();
  for (double level : cfg.levels) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("significance levels must lie in (0, 1)");
  }
  TestBattery out;
  FitConfig alt_cfg = cfg.fit;
  alt_cfg.mask = ParameterMask::none();
  const std::uint64_t alt_seed = derive_seed(seed, 0);
  out.alternative = fit_arm(y, alt_cfg, alt_cfg.mask, alt_seed, "alternative");

  std::vector<HypothesisSpec> specs;
  std::vector<McemFit> nulls;
  long horizon = out.alternative.iterations_used;
  for (auto kind : kinds) {
    specs.push_back(HypothesisSpec::make(kind, y, cfg.df_override));
    nulls.push_back(fit_arm(y, cfg.fit, specs.back().mask, null_seed(seed, kind),
                            (std::string(test_name(kind)) + " null").c_str()));
    horizon = std::max(horizon, nulls.back().iterations_used);
  }

  // The alternative is extended once to the longest horizon any test needs;
  // each test then reads it at its own comparison point.
  McemFit alt_long = out.alternative;
  if (cfg.align_iterations && horizon > alt_long.iterations_used) {
    try {
      alt_long = extend_fit(y, alt_cfg, alt_seed, alt_long, horizon);
    } catch (const Error& e) {
      throw FitError("alternative arm", e.what());
    }
  }

  for (std::size_t i = 0; i < specs.size(); ++i) {
    const HypothesisSpec& spec = specs[i];
    McemFit null_fit = std::move(nulls[i]);
    McemFit alt_fit = out.alternative;
    if (cfg.align_iterations) {
      const long at = std::max(null_fit.iterations_used, out.alternative.iterations_used);
      if (null_fit.iterations_used < at) {
        FitConfig null_cfg = cfg.fit;
        null_cfg.mask = spec.mask;
        try {
          null_fit = extend_fit(y, null_cfg, null_seed(seed, spec.kind), std::move(null_fit), at);
        } catch (const Error& e) {
          throw FitError(std::string(test_name(spec.kind)) + " null arm", e.what());
        }
      }
      alt_fit = truncate_fit(alt_long, at);
    }

    TestResult r;
    r.kind = spec.kind;
    r.form = cfg.form;
    r.df = spec.df;
    const Statistic stat = lr_statistic(null_fit, alt_fit, cfg.form);
    r.statistic = stat.value;
    r.raw_statistic = stat.raw;
    r.clamped = stat.clamped;
    if (stat.clamped) {
      r.diagnostics.push_back("statistic " + std::to_string(stat.raw) +
                              " clamped to 0: Monte Carlo noise put the null arm above the alternative");
    }
    r.p_value = chi_square_upper_tail(r.statistic, static_cast<double>(r.df));
    for (double level : cfg.levels) r.reject_at[level] = r.p_value < level;
    r.compared_at_iteration = alt_fit.iterations_used;
    r.null_fit = FitSummary::of(null_fit);
    r.alt_fit = FitSummary::of(alt_fit);
    if (!null_fit.converged) r.diagnostics.push_back("null arm did not converge");
    if (!alt_fit.converged) r.diagnostics.push_back("alternative arm did not converge");
    out.results.push_back(std::move(r));
  }
  return out;
}

TestResult run_test(const FamilyCounts& y, TestKind kind, const TestConfig& cfg, std::uint64_t seed) {
  return run_tests(y, {kind}, cfg, seed).results.front();
}

}  // namespace imprint
