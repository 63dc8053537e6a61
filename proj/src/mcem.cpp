#include "imprint/mcem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "imprint/errors.hpp"
#include "imprint/nelder_mead.hpp"

namespace imprint {

ParameterMask ParameterMask::imprinting_null() {
  ParameterMask m;
  m.fix(Parameter::kRim, 1.0);
  return m;
}

ParameterMask ParameterMask::maternal_null() {
  ParameterMask m;
  m.fix(Parameter::kS1, 1.0);
  m.fix(Parameter::kS2, 1.0);
  return m;
}

ParameterMask ParameterMask::association_null() {
  ParameterMask m;
  for (auto p : {Parameter::kR1, Parameter::kR2, Parameter::kRim, Parameter::kS1, Parameter::kS2}) {
    m.fix(p, 1.0);
  }
  return m;
}

void ParameterMask::fix(Parameter p, double value) {
  const bool ok = p == Parameter::kDelta ? (value > 0.0 && value < 1.0) : (value > 0.0 && std::isfinite(value));
  if (!ok) {
    throw ConfigError("cannot fix " + std::string(parameter_name(p)) + " at " + std::to_string(value));
  }
  fixed_[static_cast<std::size_t>(p)] = value;
}

std::vector<Parameter> ParameterMask::free_parameters() const {
  std::vector<Parameter> out;
  for (int i = 0; i < kParameters; ++i) {
    if (!fixed_[static_cast<std::size_t>(i)]) out.push_back(static_cast<Parameter>(i));
  }
  return out;
}

DiseaseModel ParameterMask::apply(DiseaseModel theta) const {
  for (int i = 0; i < kParameters; ++i) {
    if (const auto& v = fixed_[static_cast<std::size_t>(i)]) theta.set(static_cast<Parameter>(i), *v);
  }
  return theta;
}

std::string ParameterMask::describe() const {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < kParameters; ++i) {
    if (const auto& v = fixed_[static_cast<std::size_t>(i)]) {
      os << (first ? "" : ",") << parameter_name(static_cast<Parameter>(i)) << "=" << *v;
      first = false;
    }
  }
  return first ? "none" : os.str();
}

long McemFit::ascent_violations() const {
  return static_cast<long>(
      std::count_if(trace.begin(), trace.end(), [](const IterationRecord& r) { return !r.ascent_holds; }));
}

double q_data_term(const FamilyCounts& y, const DiseaseModel& theta, const SampleSet& samples,
                   KernelPolicy policy) {
  const LikelihoodKernel kernel(y, theta);
  return kernels::q_data(kernel, samples, policy);
}

double q_latent_term(const DirichletParams& alpha, const SampleSet& samples) {
  if (samples.empty()) throw ConfigError("Monte Carlo estimate needs at least one sample");
  double q = -log_beta_function(alpha);
  const auto& mean_log = samples.mean_log_z();
  for (std::size_t k = 0; k < kMatingTypes; ++k) q += (alpha.alpha[k] - 1.0) * mean_log[k];
  return q;
}

std::array<double, kMatingTypes> q_latent_gradient(const DirichletParams& alpha,
                                                   const SampleSet& samples) {
  std::array<double, kMatingTypes> g{};
  const double psi_total = boost::math::digamma(alpha.sum());
  const auto& mean_log = samples.mean_log_z();
  for (std::size_t k = 0; k < kMatingTypes; ++k) {
    g[k] = psi_total - boost::math::digamma(alpha.alpha[k]) + mean_log[k];
  }
  return g;
}

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double to_unbounded(Parameter p, double value) {
  return p == Parameter::kDelta ? std::log(value / (1.0 - value)) : std::log(value);
}

double from_unbounded(Parameter p, double x) {
  return p == Parameter::kDelta ? logistic(x) : std::exp(x);
}

// q_data_term, or -infinity where theta leaves the feasible region.
double feasible_q(const FamilyCounts& y, const DiseaseModel& theta, const SampleSet& samples,
                  KernelPolicy policy) {
  if (!theta.has_valid_domain() || !validate_penetrance_bounds(theta)) {
    return -std::numeric_limits<double>::infinity();
  }
  try {
    return q_data_term(y, theta, samples, policy);
  } catch (const LogOfZero&) {
    return -std::numeric_limits<double>::infinity();
  } catch (const PenetranceOverflow&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

ThetaStep maximize_theta(const FamilyCounts& y, const SampleSet& samples,
                         const DiseaseModel& theta_init, const ParameterMask& mask,
                         KernelPolicy policy) {
  const DiseaseModel start = mask.apply(theta_init);
  ThetaStep out;
  out.theta = start;
  out.q_start = feasible_q(y, start, samples, policy);
  out.q = out.q_start;
  if (!std::isfinite(out.q_start)) {
    throw OptimizerFailure("Monte Carlo data term is not finite at the starting theta",
                           start.as_array(), out.q_start);
  }
  const auto free = mask.free_parameters();
  if (free.empty()) {
    out.optimizer_converged = true;
    return out;
  }

  auto decode = [&](const std::vector<double>& x) {
    DiseaseModel theta = start;
    for (std::size_t i = 0; i < free.size(); ++i) theta.set(free[i], from_unbounded(free[i], x[i]));
    return theta;
  };
  std::vector<double> x0(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) x0[i] = to_unbounded(free[i], start.get(free[i]));

  auto objective = [&](const std::vector<double>& x) {
    return -feasible_q(y, decode(x), samples, policy);
  };
  const auto result = nelder_mead(objective, x0);
  out.evaluations = result.evaluations;
  out.optimizer_converged = result.converged;
  if (!std::isfinite(result.value)) {
    throw OptimizerFailure("theta optimizer found no feasible point", start.as_array(), out.q_start);
  }
  const DiseaseModel candidate = decode(result.x);
  const double q = feasible_q(y, candidate, samples, policy);
  // Decoding can round; keep the start unless the candidate is genuinely better.
  if (q > out.q_start) {
    out.theta = candidate;
    out.q = q;
  }
  return out;
}

DirichletParams moment_match_alpha(const SampleSet& samples) {
  const std::size_t n = samples.size();
  std::array<double, kMatingTypes> mean{};
  std::array<double, kMatingTypes> var{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = samples.row(i);
    for (std::size_t k = 0; k < kMatingTypes; ++k) mean[k] += z[k];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = samples.row(i);
    for (std::size_t k = 0; k < kMatingTypes; ++k) var[k] += (z[k] - mean[k]) * (z[k] - mean[k]);
  }
  double spread = 0.0;
  double total_var = 0.0;
  for (std::size_t k = 0; k < kMatingTypes; ++k) {
    var[k] /= static_cast<double>(n > 1 ? n - 1 : 1);
    spread += mean[k] * (1.0 - mean[k]);
    total_var += var[k];
  }
  // Var(z_k) = m_k (1 - m_k) / (s + 1) for precision s, pooled over k.
  double precision = total_var > 0.0 ? spread / total_var - 1.0 : 1.0;
  if (!(precision > 0.0) || !std::isfinite(precision)) precision = 1.0;
  DirichletParams out;
  for (std::size_t k = 0; k < kMatingTypes; ++k) {
    out.alpha[k] = std::max(precision * mean[k], 1e-6);
  }
  return out;
}

DirichletParams maximize_alpha(const SampleSet& samples) {
  if (samples.size() < 2) throw DegenerateSamples("Dirichlet fit needs at least two samples");
  for (double v : samples.mean_log_z()) {
    if (!std::isfinite(v)) throw DegenerateSamples("a coordinate has log-mean of -infinity");
  }
  bool distinct = false;
  for (std::size_t i = 1; i < samples.size() && !distinct; ++i) {
    distinct = samples.samples()[i].z != samples.samples()[0].z;
  }
  if (!distinct) throw DegenerateSamples("all samples are identical; Dirichlet MLE does not exist");

  DirichletParams alpha = moment_match_alpha(samples);
  double value = q_latent_term(alpha, samples);
  for (int iter = 0; iter < 500; ++iter) {
    const auto g = q_latent_gradient(alpha, samples);
    double norm = 0.0;
    for (double v : g) norm += v * v;
    if (std::sqrt(norm) < 1e-12) break;

    // Hessian = diag(-trigamma(alpha_k)) + trigamma(sum alpha) * 1 1^T.
    std::array<double, kMatingTypes> q{};
    double sum_gq = 0.0;
    double sum_inv_q = 0.0;
    for (std::size_t k = 0; k < kMatingTypes; ++k) {
      q[k] = -boost::math::trigamma(alpha.alpha[k]);
      sum_gq += g[k] / q[k];
      sum_inv_q += 1.0 / q[k];
    }
    const double b = sum_gq / (1.0 / boost::math::trigamma(alpha.sum()) + sum_inv_q);
    std::array<double, kMatingTypes> step{};
    for (std::size_t k = 0; k < kMatingTypes; ++k) step[k] = (g[k] - b) / q[k];

    double scale = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
      DirichletParams trial = alpha;
      bool positive = true;
      for (std::size_t k = 0; k < kMatingTypes; ++k) {
        trial.alpha[k] = alpha.alpha[k] - scale * step[k];
        positive = positive && trial.alpha[k] > 0.0;
      }
      if (!positive) continue;
      const double trial_value = q_latent_term(trial, samples);
      if (trial_value >= value) {
        moved = trial.alpha != alpha.alpha;
        alpha = trial;
        value = trial_value;
        break;
      }
    }
    if (!moved) break;
  }
  return alpha;
}

DirichletParams initial_alpha(const FamilyCounts& y) {
  DirichletParams a = DirichletParams::uniform(1.0);
  for (const auto& t : trio_types()) {
    a.alpha[static_cast<std::size_t>(t.mating_index())] +=
        static_cast<double>(y.n0[static_cast<std::size_t>(t.index - 1)]);
  }
  return a;
}

namespace {

void check_fit_inputs(const FamilyCounts& y, const FitConfig& cfg) {
  y.validate();
  cfg.chain.validate();
  if (cfg.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(cfg.tolerance >= 0.0)) throw ConfigError("tolerance must be nonnegative");
}

// Runs EM iterations first..last on `out`, starting from out.psi. Returns
// after the first iteration meeting the stopping rule when `stop` is set.
void run_iterations(const FamilyCounts& y, const FitConfig& cfg, std::uint64_t seed, McemFit& out,
                    long first, long last, bool stop) {
  const auto free = cfg.mask.free_parameters();
  PsiState psi = out.psi;
  for (long t = first; t <= last; ++t) {
    const std::string context = "MCEM iteration " + std::to_string(t);
    try {
      ChainConfig chain = cfg.chain;
      chain.seed = derive_seed(seed, static_cast<std::uint64_t>(t));
      Rng rng(chain.seed);
      const ChainResult draws = run_chain(y, psi.theta, psi.alpha, chain, rng);
      const SampleSet samples(draws.samples);

      const ThetaStep theta_step = maximize_theta(y, samples, psi.theta, cfg.mask, cfg.kernel_policy);
      DirichletParams alpha_next = maximize_alpha(samples);
      const double latent_before = q_latent_term(psi.alpha, samples);
      double latent_after = q_latent_term(alpha_next, samples);
      if (latent_after < latent_before) {
        alpha_next = psi.alpha;
        latent_after = latent_before;
        out.warnings.push_back(context + ": Dirichlet update did not improve; alpha kept");
      }

      IterationRecord rec;
      rec.iteration = t;
      rec.theta = theta_step.theta;
      rec.alpha = alpha_next;
      rec.alpha_sum = alpha_next.sum();
      rec.q_before = theta_step.q_start + latent_before;
      rec.q_after = theta_step.q + latent_after;
      rec.q_data = theta_step.q;
      rec.q_latent = latent_after;
      rec.acceptance_rate = draws.acceptance_rate;
      rec.lag1_autocorrelation = draws.lag1_autocorrelation;
      rec.ascent_holds = rec.q_after >= rec.q_before;
      for (auto p : free) rec.change += std::abs(theta_step.theta.get(p) - psi.theta.get(p));
      if (cfg.rule == ConvergenceRule::kJoint) {
        for (std::size_t k = 0; k < kMatingTypes; ++k) {
          rec.change += std::abs(alpha_next.alpha[k] - psi.alpha.alpha[k]);
        }
      }
      if (draws.low_acceptance) {
        out.warnings.push_back(context + ": low acceptance rate " +
                               std::to_string(draws.acceptance_rate));
      }

      out.trace.push_back(rec);
      out.acceptance_rates.push_back(draws.acceptance_rate);
      psi = PsiState{theta_step.theta, alpha_next, t + 1};
      out.psi = psi;
      out.q_data_term = theta_step.q;
      out.q_latent_term = latent_after;
      out.iterations_used = t;
      if (stop && rec.change < cfg.tolerance) {
        out.converged = true;
        out.converged_at = t;
        return;
      }
    } catch (const FitError&) {
      throw;
    } catch (const Error& e) {
      throw FitError(context, e.what());
    }
  }
}

}  // namespace

McemFit fit(const FamilyCounts& y, const FitConfig& cfg, std::uint64_t seed) {
  check_fit_inputs(y, cfg);
  McemFit out;
  out.psi = PsiState{cfg.mask.apply(cfg.theta_init), initial_alpha(y), 1};
  if (!out.psi.theta.has_valid_domain() || !validate_penetrance_bounds(out.psi.theta)) {
    throw ConfigError("initial theta is outside the feasible region");
  }
  out.data_fingerprint = y.fingerprint();
  out.mask = cfg.mask;
  run_iterations(y, cfg, seed, out, 1, cfg.max_iterations, true);
  return out;
}

McemFit extend_fit(const FamilyCounts& y, const FitConfig& cfg, std::uint64_t seed, McemFit prior,
                   long last_iteration) {
  check_fit_inputs(y, cfg);
  if (prior.data_fingerprint != y.fingerprint()) {
    throw MismatchedData("cannot extend a fit with different family counts");
  }
  run_iterations(y, cfg, seed, prior, prior.iterations_used + 1, last_iteration, false);
  return prior;
}

McemFit truncate_fit(const McemFit& fit, long iteration) {
  if (iteration < 1 || iteration > fit.iterations_used) {
    throw ConfigError("cannot truncate a fit of " + std::to_string(fit.iterations_used) +
                      " iterations at iteration " + std::to_string(iteration));
  }
  McemFit out = fit;
  const auto n = static_cast<std::size_t>(iteration);
  out.trace.resize(n);
  out.acceptance_rates.resize(n);
  const IterationRecord& last = out.trace.back();
  out.psi = PsiState{last.theta, last.alpha, iteration + 1};
  out.q_data_term = last.q_data;
  out.q_latent_term = last.q_latent;
  out.iterations_used = iteration;
  out.converged = fit.converged_at > 0 && fit.converged_at <= iteration;
  out.converged_at = out.converged ? fit.converged_at : 0;
  return out;
}

}  // namespace imprint
