#pragma once

// Monte Carlo EM for psi = (theta, alpha): the E-step runs the independence
// chain at the current psi, the M-step maximizes the Monte Carlo data term
// over theta and the Dirichlet term over alpha on that fixed sample set.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imprint/genetics.hpp"
#include "imprint/kernels.hpp"
#include "imprint/likelihood.hpp"
#include "imprint/sampler.hpp"

namespace imprint {

// Parameters pinned to fixed values; unpinned ones are free for the M-step.
class ParameterMask {
 public:
  static ParameterMask none() { return {}; }
  static ParameterMask imprinting_null();   // rim = 1
  static ParameterMask maternal_null();     // s1 = s2 = 1
  static ParameterMask association_null();  // all five risks = 1

  void fix(Parameter p, double value);
  bool is_fixed(Parameter p) const { return fixed_[static_cast<std::size_t>(p)].has_value(); }
  std::optional<double> fixed_value(Parameter p) const { return fixed_[static_cast<std::size_t>(p)]; }
  std::vector<Parameter> free_parameters() const;
  DiseaseModel apply(DiseaseModel theta) const;
  std::string describe() const;

  bool operator==(const ParameterMask&) const = default;

 private:
  std::array<std::optional<double>, kParameters> fixed_{};
};

struct PsiState {
  DiseaseModel theta;
  DirichletParams alpha;
  long iteration = 0;
};

enum class ConvergenceRule {
  kJoint,      // sum |delta psi| over free theta coordinates and all of alpha
  kThetaOnly,  // sum |delta theta| over free coordinates
};

struct FitConfig {
  ChainConfig chain;
  long max_iterations = 200;
  double tolerance = 0.01;
  ConvergenceRule rule = ConvergenceRule::kThetaOnly;
  DiseaseModel theta_init = DiseaseModel::null_model(0.0067);
  ParameterMask mask;
  KernelPolicy kernel_policy = KernelPolicy::kSerial;
};

struct IterationRecord {
  long iteration = 0;
  DiseaseModel theta;         // after the M-step
  DirichletParams alpha;      // after the M-step
  double alpha_sum = 0.0;
  double q_before = 0.0;      // Q_MC(psi^(t)) on this iteration's samples
  double q_after = 0.0;       // Q_MC(psi^(t+1)) on the same samples
  double q_data = 0.0;        // data term of q_after
  double q_latent = 0.0;      // latent term of q_after
  double acceptance_rate = 0.0;
  double lag1_autocorrelation = 0.0;
  double change = 0.0;        // convergence metric
  bool ascent_holds = true;
};

struct McemFit {
  PsiState psi;
  double q_data_term = 0.0;    // E-hat{log f(Y | Z; theta)} at the final psi
  double q_latent_term = 0.0;  // E-hat{log g(Z; alpha)} at the final psi
  bool converged = false;
  long converged_at = 0;  // iteration where the stopping rule first held; 0 if never
  long iterations_used = 0;
  std::vector<double> acceptance_rates;
  std::vector<IterationRecord> trace;
  std::vector<std::string> warnings;
  std::uint64_t data_fingerprint = 0;
  ParameterMask mask;

  long ascent_violations() const;
};

// Monte Carlo data term: average of full_log_likelihood over the samples.
double q_data_term(const FamilyCounts& y, const DiseaseModel& theta, const SampleSet& samples,
                   KernelPolicy policy = KernelPolicy::kSerial);
// -log B(alpha) + sum_mf (alpha_mf - 1) * mean log z_mf.
double q_latent_term(const DirichletParams& alpha, const SampleSet& samples);
// Gradient of q_latent_term with respect to alpha.
std::array<double, kMatingTypes> q_latent_gradient(const DirichletParams& alpha,
                                                   const SampleSet& samples);

struct ThetaStep {
  DiseaseModel theta;
  double q = 0.0;
  double q_start = 0.0;
  std::size_t evaluations = 0;
  bool optimizer_converged = false;
};

// Maximizes q_data_term over the free coordinates (logit delta, log risks)
// subject to penetrance <= 1. The returned point is never worse than the
// start. Throws OptimizerFailure if q is not finite at the start.
ThetaStep maximize_theta(const FamilyCounts& y, const SampleSet& samples,
                         const DiseaseModel& theta_init, const ParameterMask& mask,
                         KernelPolicy policy = KernelPolicy::kSerial);

// Method-of-moments Dirichlet fit, the Newton starting point.
DirichletParams moment_match_alpha(const SampleSet& samples);
// Dirichlet maximum likelihood on the sample mean logs (Newton iteration
// exploiting the diagonal-plus-rank-one Hessian). Throws DegenerateSamples
// for fewer than two distinct samples.
DirichletParams maximize_alpha(const SampleSet& samples);

// alpha^(1)_mf = sum_c n0_mfc + 1.
DirichletParams initial_alpha(const FamilyCounts& y);

McemFit fit(const FamilyCounts& y, const FitConfig& cfg, std::uint64_t seed);

// Continues a fit produced by fit() with the same data, configuration and
// seed through `last_iteration`, ignoring the stopping rule. Iteration t
// always draws its chain from derive_seed(seed, t), so the extended trace
// agrees with a longer uninterrupted run. `converged` keeps describing the
// original stopping point.
McemFit extend_fit(const FamilyCounts& y, const FitConfig& cfg, std::uint64_t seed, McemFit prior,
                   long last_iteration);

// The state of `fit` right after iteration `iteration` (1..iterations_used),
// rebuilt from its trace.
McemFit truncate_fit(const McemFit& fit, long iteration);

}  // namespace imprint
