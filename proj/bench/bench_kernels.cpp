// Times the three Monte Carlo data-term implementations and one E-step
// chain on a simulated dataset. Usage: bench_kernels [samples] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "imprint/kernels.hpp"
#include "imprint/sampler.hpp"
#include "imprint/simulator.hpp"

using namespace imprint;

namespace {

template <class F>
double best_seconds(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s < best) best = s;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const long n = argc > 1 ? std::atol(argv[1]) : 20000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;

  const ScenarioConfig scenario = ScenarioConfig::standard(8);
  const DiseaseModel truth = calibrated_model(7, scenario);
  Rng rng(derive_seed(2024, 1));
  const FamilyCounts y = simulate_dataset(truth, scenario, rng);

  DirichletParams alpha;
  for (std::size_t k = 0; k < kMatingTypes; ++k) alpha.alpha[k] = 5.0 + static_cast<double>(k);
  DirichletSampler draw(alpha);
  std::vector<SimplexSample> raw;
  raw.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) raw.push_back(draw(rng));
  const SampleSet samples(raw);
  const LikelihoodKernel kernel(y, truth);

  double ref = 0.0, ser = 0.0, par = 0.0;
  const double t_ref = best_seconds(repeats, [&] { ref = kernels::q_data_reference(y, truth, samples); });
  const double t_ser = best_seconds(repeats, [&] { ser = kernels::q_data_serial(kernel, samples); });
  const double t_par = best_seconds(repeats, [&] { par = kernels::q_data_parallel(kernel, samples); });

  std::printf("samples %ld, threads %d\n", n, omp_get_max_threads());
  std::printf("%-10s %12s %12s %22s\n", "kernel", "seconds", "ns/sample", "value");
  std::printf("%-10s %12.6f %12.2f %22.12f\n", "reference", t_ref, 1e9 * t_ref / static_cast<double>(n), ref);
  std::printf("%-10s %12.6f %12.2f %22.12f\n", "serial", t_ser, 1e9 * t_ser / static_cast<double>(n), ser);
  std::printf("%-10s %12.6f %12.2f %22.12f\n", "parallel", t_par, 1e9 * t_par / static_cast<double>(n), par);
  std::printf("serial == parallel bitwise: %s\n", ser == par ? "yes" : "no");

  const ChainConfig chain{2000, 50, 2000, 1};
  const double t_chain = best_seconds(1, [&] {
    Rng chain_rng(7);
    run_chain(y, truth, alpha, chain, chain_rng);
  });
  std::printf("desk chain (%ld proposals): %.3f s\n", chain.proposals(), t_chain);
  return 0;
}
