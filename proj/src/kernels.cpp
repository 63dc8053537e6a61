#include "imprint/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "imprint/errors.hpp"

namespace imprint {

SampleSet::SampleSet(std::span<const SimplexSample> samples)
    : n_(samples.size()), samples_(samples.begin(), samples.end()) {
  z_.resize(n_ * kMatingTypes);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = 0; k < kMatingTypes; ++k) {
      z_[i * kMatingTypes + k] = samples[i].z[k];
      mean_log_z_[k] += samples[i].log_z[k];
    }
  }
  if (n_ > 0) {
    for (double& v : mean_log_z_) v /= static_cast<double>(n_);
  }
}

namespace kernels {

namespace {

void require_samples(const SampleSet& samples) {
  if (samples.empty()) throw ConfigError("Monte Carlo estimate needs at least one sample");
}

// Sum over samples i in [begin, end) of N1 log(a.z_i) + N0 log(b.z_i).
double block_sum(const LikelihoodKernel& kernel, const SampleSet& samples, std::size_t begin,
                 std::size_t end) {
  const auto& a = kernel.affected_mass();
  const auto& b = kernel.unaffected_mass();
  const double n1 = kernel.case_total();
  const double n0 = kernel.control_total();
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const auto z = samples.row(i);
    double az = 0.0;
    double bz = 0.0;
    for (std::size_t k = 0; k < kMatingTypes; ++k) {
      az += a[k] * z[k];
      bz += b[k] * z[k];
    }
    if (n1 > 0.0) s += n1 * std::log(az);
    if (n0 > 0.0) s += n0 * std::log(bz);
  }
  return s;
}

double combine(const LikelihoodKernel& kernel, const SampleSet& samples,
               const std::vector<double>& blocks) {
  double normalizers = 0.0;
  for (double b : blocks) normalizers += b;
  double q = kernel.theta_constant();
  const auto& counts = kernel.mating_counts();
  const auto& mean_log = samples.mean_log_z();
  for (std::size_t k = 0; k < kMatingTypes; ++k) {
    if (counts[k] != 0.0) q += counts[k] * mean_log[k];
  }
  return q - normalizers / static_cast<double>(samples.size());
}

std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

}  // namespace

double q_data_reference(const FamilyCounts& y, const DiseaseModel& theta, const SampleSet& samples) {
  require_samples(samples);
  double total = 0.0;
  for (const auto& s : samples.samples()) {
    total += full_log_likelihood(y, theta, s.as_distribution());
  }
  return total / static_cast<double>(samples.size());
}

double q_data_serial(const LikelihoodKernel& kernel, const SampleSet& samples) {
  require_samples(samples);
  const std::size_t n = samples.size();
  std::vector<double> blocks(block_count(n));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b] = block_sum(kernel, samples, b * kBlockSize, std::min(n, (b + 1) * kBlockSize));
  }
  return combine(kernel, samples, blocks);
}

double q_data_parallel(const LikelihoodKernel& kernel, const SampleSet& samples) {
  require_samples(samples);
  const std::size_t n = samples.size();
  const auto nb = static_cast<long>(block_count(n));
  std::vector<double> blocks(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
  for (long b = 0; b < nb; ++b) {
    const auto ub = static_cast<std::size_t>(b);
    blocks[ub] = block_sum(kernel, samples, ub * kBlockSize, std::min(n, (ub + 1) * kBlockSize));
  }
  return combine(kernel, samples, blocks);
}

double q_data(const LikelihoodKernel& kernel, const SampleSet& samples, KernelPolicy policy) {
  return policy == KernelPolicy::kParallel ? q_data_parallel(kernel, samples)
                                           : q_data_serial(kernel, samples);
}

}  // namespace kernels
}  // namespace imprint
