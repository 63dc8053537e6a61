#include <cmath>

#include "doctest.h"
#include "imprint/errors.hpp"
#include "imprint/mcem.hpp"
#include "imprint/simulator.hpp"

using namespace imprint;

namespace {

SampleSet dirichlet_samples(const DirichletParams& a, long n, std::uint64_t seed) {
  Rng rng(seed);
  DirichletSampler draw(a);
  std::vector<SimplexSample> raw;
  for (long i = 0; i < n; ++i) raw.push_back(draw(rng));
  return SampleSet(raw);
}

FamilyCounts simulated(int model, int scenario, std::uint64_t seed, bool siblings = false) {
  ScenarioConfig sc = ScenarioConfig::standard(scenario);
  sc.with_siblings = siblings;
  Rng rng(seed);
  return simulate_dataset(calibrated_model(model, sc), sc, rng);
}

FitConfig quick_config() {
  FitConfig cfg;
  cfg.chain = ChainConfig{300, 5, 300, 1};
  cfg.max_iterations = 40;
  return cfg;
}

}  // namespace

TEST_CASE("latent-term gradient matches central differences") {
  DirichletParams a;
  for (std::size_t k = 0; k < kMatingTypes; ++k) a.alpha[k] = 0.8 + 0.6 * static_cast<double>(k);
  const SampleSet s = dirichlet_samples(a, 500, 2);
  DirichletParams at = a;
  at.alpha[3] *= 1.3;
  const auto g = q_latent_gradient(at, s);
  for (std::size_t k = 0; k < kMatingTypes; ++k) {
    const double h = 1e-5 * at.alpha[k];
    DirichletParams up = at, dn = at;
    up.alpha[k] += h;
    dn.alpha[k] -= h;
    const double fd = (q_latent_term(up, s) - q_latent_term(dn, s)) / (2 * h);
    CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("Dirichlet MLE recovers the generating parameters") {
  DirichletParams a;
  for (std::size_t k = 0; k < kMatingTypes; ++k) a.alpha[k] = 0.5 + static_cast<double>(k);
  const SampleSet s = dirichlet_samples(a, 40000, 8);
  const DirichletParams fit_a = maximize_alpha(s);
  for (std::size_t k = 0; k < kMatingTypes; ++k) CHECK(fit_a.alpha[k] == doctest::Approx(a.alpha[k]).epsilon(0.05));
  for (double gk : q_latent_gradient(fit_a, s)) CHECK(std::abs(gk) < 1e-8);
  CHECK(q_latent_term(fit_a, s) >= q_latent_term(moment_match_alpha(s), s));
}

TEST_CASE("Dirichlet MLE rejects degenerate sample sets") {
  const auto one = SimplexSample::from_probabilities(MatingTypeDistribution::uniform().mu);
  std::vector<SimplexSample> single{one};
  CHECK_THROWS_AS(maximize_alpha(SampleSet(single)), DegenerateSamples);
  std::vector<SimplexSample> same{one, one, one};
  CHECK_THROWS_AS(maximize_alpha(SampleSet(same)), DegenerateSamples);
}

TEST_CASE("initial alpha is control counts per mating type plus one") {
  FamilyCounts y;
  y.n0[trio_index_of(1, 1, 0) - 1] = 3;
  y.n0[trio_index_of(1, 1, 2) - 1] = 2;
  y.n0[0] = 4;
  y.n1[0] = 10;
  const DirichletParams a = initial_alpha(y);
  CHECK(a.alpha[0] == 5.0);
  CHECK(a.alpha[4] == 6.0);
  CHECK(a.alpha[8] == 1.0);
}

TEST_CASE("theta step on a single exact point matches a grid maximization") {
  const FamilyCounts y = simulated(5, 6, 41);
  const MatingTypeDistribution mu = mating_distribution(ScenarioConfig::standard(6));
  const std::vector<SimplexSample> point{SimplexSample::from_probabilities(mu.mu)};
  const SampleSet s(point);
  // Only rim is free.
  ParameterMask mask;
  const DiseaseModel base{0.02, 1.0, 3.0, 1.0, 1.0, 1.0};
  for (auto p : {Parameter::kDelta, Parameter::kR1, Parameter::kR2, Parameter::kS1, Parameter::kS2}) {
    mask.fix(p, base.get(p));
  }
  const ThetaStep step = maximize_theta(y, s, base, mask);
  double best = -1e300, best_rim = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    DiseaseModel t = base;
    t.rim = std::exp(-2.0 + 4.0 * i / 20000.0);
    if (!validate_penetrance_bounds(t)) continue;
    const double v = full_log_likelihood(y, t, mu);
    if (v > best) {
      best = v;
      best_rim = t.rim;
    }
  }
  CHECK(step.theta.rim == doctest::Approx(best_rim).epsilon(1e-3));
  CHECK(step.q >= best - 1e-9);
  CHECK(step.theta.r2 == 3.0);
  CHECK(step.q >= step.q_start);
}

TEST_CASE("association null with siblings estimates delta as a binomial rate") {
  FamilyCounts y = simulated(1, 4, 5, true);
  y.sn1 = {};
  y.sn0 = {};
  y.sn1[2] = 7;
  y.sn1[9] = 5;
  y.sn0[0] = 100;
  y.sn0[12] = 40;
  const std::vector<SimplexSample> point{
      SimplexSample::from_probabilities(MatingTypeDistribution::uniform().mu)};
  const ThetaStep step =
      maximize_theta(y, SampleSet(point), DiseaseModel::null_model(0.3), ParameterMask::association_null());
  CHECK(step.theta.delta == doctest::Approx(12.0 / 152.0).epsilon(1e-4));
}

TEST_CASE("fit is deterministic, ascends every iteration and honours the mask") {
  const FamilyCounts y = simulated(4, 8, 13);
  FitConfig cfg = quick_config();
  cfg.mask = ParameterMask::maternal_null();
  const McemFit a = fit(y, cfg, 99);
  const McemFit b = fit(y, cfg, 99);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].theta.as_array() == b.trace[i].theta.as_array());
    CHECK(a.trace[i].q_after >= a.trace[i].q_before);
  }
  CHECK(a.ascent_violations() == 0);
  CHECK(a.psi.theta.s1 == 1.0);
  CHECK(a.psi.theta.s2 == 1.0);
  CHECK(a.converged);
  CHECK(a.converged_at == a.iterations_used);
  CHECK(a.acceptance_rates.size() == static_cast<std::size_t>(a.iterations_used));
}

TEST_CASE("extending a fit equals running longer from the start") {
  const FamilyCounts y = simulated(3, 8, 21);
  FitConfig cfg = quick_config();
  const McemFit stopped = fit(y, cfg, 5);
  const long target = stopped.iterations_used + 3;
  const McemFit extended = extend_fit(y, cfg, 5, stopped, target);
  FitConfig longer = cfg;
  longer.tolerance = 0.0;
  longer.max_iterations = target;
  const McemFit direct = fit(y, longer, 5);
  REQUIRE(extended.trace.size() == direct.trace.size());
  for (std::size_t i = 0; i < direct.trace.size(); ++i) {
    CHECK(extended.trace[i].q_after == direct.trace[i].q_after);
  }
  CHECK(extended.psi.theta.as_array() == direct.psi.theta.as_array());
  CHECK(extended.converged);

  const McemFit back = truncate_fit(extended, stopped.iterations_used);
  CHECK(back.psi.theta.as_array() == stopped.psi.theta.as_array());
  CHECK(back.psi.alpha.alpha == stopped.psi.alpha.alpha);
  CHECK(back.q_data_term == stopped.q_data_term);
  CHECK(back.q_latent_term == stopped.q_latent_term);
  CHECK_THROWS_AS(truncate_fit(extended, target + 1), ConfigError);
}

TEST_CASE("mask validation") {
  ParameterMask m;
  CHECK_THROWS_AS(m.fix(Parameter::kRim, 0.0), ConfigError);
  CHECK_THROWS_AS(m.fix(Parameter::kDelta, 1.0), ConfigError);
  CHECK(ParameterMask::association_null().free_parameters() == std::vector<Parameter>{Parameter::kDelta});
  CHECK(ParameterMask::imprinting_null().describe() == "rim=1");
}
