#include "imprint/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "imprint/errors.hpp"

namespace imprint {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                          std::uint64_t d) {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = mix(master);
  for (std::uint64_t v : {a, b, c, d}) h = mix(h ^ mix(v));
  return h;
}

double DirichletParams::sum() const {
  double s = 0.0;
  for (double a : alpha) s += a;
  return s;
}

MatingTypeDistribution DirichletParams::mean() const {
  MatingTypeDistribution out;
  const double s = sum();
  for (std::size_t k = 0; k < kMatingTypes; ++k) out.mu[k] = alpha[k] / s;
  return out;
}

void DirichletParams::validate() const {
  for (std::size_t k = 0; k < kMatingTypes; ++k) {
    if (!(alpha[k] > 0.0) || !std::isfinite(alpha[k])) {
      throw ConfigError("Dirichlet parameter " + std::to_string(k) + " must be positive, got " +
                        std::to_string(alpha[k]));
    }
  }
}

DirichletParams DirichletParams::uniform(double value) {
  DirichletParams p;
  p.alpha.fill(value);
  return p;
}

SimplexSample SimplexSample::from_probabilities(const std::array<double, kMatingTypes>& z) {
  SimplexSample s;
  s.z = z;
  for (std::size_t k = 0; k < kMatingTypes; ++k) s.log_z[k] = std::log(z[k]);
  return s;
}

void ChainConfig::validate() const {
  if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (keep < 1) throw ConfigError("keep must be >= 1");
}

double log_beta_function(const DirichletParams& alpha) {
  double lb = 0.0;
  for (double a : alpha.alpha) lb += boost::math::lgamma(a);
  return lb - boost::math::lgamma(alpha.sum());
}

double dirichlet_log_pdf(const DirichletParams& alpha, const SimplexSample& z) {
  double lp = -log_beta_function(alpha);
  for (std::size_t k = 0; k < kMatingTypes; ++k) lp += (alpha.alpha[k] - 1.0) * z.log_z[k];
  return lp;
}

DirichletSampler::DirichletSampler(const DirichletParams& alpha) : alpha_(alpha) {
  alpha_.validate();
}

SimplexSample DirichletSampler::operator()(Rng& rng) {
  using Param = std::gamma_distribution<double>::param_type;
  SimplexSample s;
  for (;;) {
    bool small_shape = false;
    double total = 0.0;
    for (std::size_t k = 0; k < kMatingTypes; ++k) {
      const double a = alpha_.alpha[k];
      if (a >= 1.0) {
        s.z[k] = gamma_(rng, Param(a, 1.0));
        s.log_z[k] = std::log(s.z[k]);
        total += s.z[k];
      } else {
        // Gamma(a) = Gamma(a + 1) * U^(1/a), kept in log space.
        s.log_z[k] = std::log(gamma_(rng, Param(a + 1.0, 1.0))) + std::log(uniform_(rng)) / a;
        small_shape = true;
      }
    }
    if (small_shape) {
      double top = -std::numeric_limits<double>::infinity();
      for (double lg : s.log_z) top = std::max(top, lg);
      total = 0.0;
      for (std::size_t k = 0; k < kMatingTypes; ++k) {
        s.log_z[k] -= top;
        s.z[k] = std::exp(s.log_z[k]);
        total += s.z[k];
      }
    }
    const double log_total = std::log(total);
    bool interior = std::isfinite(log_total);
    for (std::size_t k = 0; k < kMatingTypes; ++k) {
      s.z[k] /= total;
      s.log_z[k] -= log_total;
      interior = interior && s.z[k] > 0.0;
    }
    // A coordinate that underflowed to 0 is redrawn; the event has
    // negligible probability for the shapes reached in practice.
    if (interior) return s;
  }
}

SimplexSample dirichlet_sample(const DirichletParams& alpha, Rng& rng) {
  DirichletSampler sampler(alpha);
  return sampler(rng);
}

double mh_ratio(const FamilyCounts& y, const DiseaseModel& theta, const SimplexSample& current,
                const SimplexSample& proposed) {
  const double num = full_log_likelihood(y, theta, proposed.as_distribution());
  const double den = full_log_likelihood(y, theta, current.as_distribution());
  return std::exp(num - den);
}

namespace {

double max_lag1_autocorrelation(const std::vector<SimplexSample>& samples) {
  const std::size_t n = samples.size();
  if (n < 3) return 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < kMatingTypes; ++k) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.z[k];
    mean /= static_cast<double>(n);
    double var = 0.0;
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = samples[i].z[k] - mean;
      var += d * d;
      if (i + 1 < n) cov += d * (samples[i + 1].z[k] - mean);
    }
    if (var > 0.0) worst = std::max(worst, std::abs(cov / var));
  }
  return worst;
}

template <class LogLik>
ChainResult run_chain_impl(const LogLik& log_likelihood, const DirichletParams& alpha,
                           const ChainConfig& cfg, Rng& rng, const ProposalObserver& observer) {
  cfg.validate();
  alpha.validate();
  DirichletSampler propose(alpha);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  SimplexSample current = SimplexSample::from_probabilities(alpha.mean().mu);
  double current_ll = log_likelihood(current);

  ChainResult out;
  out.samples.reserve(static_cast<std::size_t>(cfg.keep));
  const long total = cfg.proposals();
  for (long step = 1; step <= total; ++step) {
    SimplexSample proposed = propose(rng);
    const double proposed_ll = log_likelihood(proposed);
    const double log_u = std::log(uniform(rng));
    // Accept with probability min{R, 1}; the prior and proposal densities cancel.
    const bool accept = log_u < proposed_ll - current_ll ||
                        (std::isinf(current_ll) && current_ll < 0 && std::isfinite(proposed_ll));
    if (observer) observer(ProposalEvent{step, current_ll, proposed_ll, log_u, accept});
    if (accept) {
      current = proposed;
      current_ll = proposed_ll;
      ++out.accepted;
    }
    if (step > cfg.burn_in && (step - cfg.burn_in) % cfg.thin == 0) {
      out.samples.push_back(current);
    }
  }
  out.proposals = total;
  out.acceptance_rate = total > 0 ? static_cast<double>(out.accepted) / static_cast<double>(total) : 0.0;
  out.low_acceptance = out.acceptance_rate < kLowAcceptanceRate;
  out.lag1_autocorrelation = max_lag1_autocorrelation(out.samples);
  return out;
}

}  // namespace

ChainResult run_independence_chain(
    const std::function<double(const SimplexSample&)>& log_likelihood,
    const DirichletParams& alpha, const ChainConfig& cfg, Rng& rng,
    const ProposalObserver& observer) {
  return run_chain_impl(log_likelihood, alpha, cfg, rng, observer);
}

ChainResult run_chain(const FamilyCounts& y, const DiseaseModel& theta,
                      const DirichletParams& alpha, const ChainConfig& cfg, Rng& rng,
                      const ProposalObserver& observer) {
  const LikelihoodKernel kernel(y, theta);
  auto ll = [&kernel](const SimplexSample& s) { return kernel.log_likelihood(s.z, s.log_z); };
  return run_chain_impl(ll, alpha, cfg, rng, observer);
}

}  // namespace imprint
