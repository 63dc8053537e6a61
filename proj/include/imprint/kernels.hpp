#pragma once

// Monte Carlo estimate of E{log f(Y | Z; theta) | Y} over a fixed set of
// kept chain samples. This is the inner loop of every M-step objective
// evaluation, so it comes in three flavours:
//
//   reference  literal average of full_log_likelihood, one sample at a time
//   serial     factorized kernel, single thread
//   parallel   factorized kernel, OpenMP over fixed-size blocks
//
// serial and parallel share the block decomposition and the order of the
// final reduction, so they return bit-identical values for any thread count.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "imprint/likelihood.hpp"
#include "imprint/sampler.hpp"

namespace imprint {

// Kept samples laid out for the kernels, with the sample means of log z.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::span<const SimplexSample> samples);

  std::size_t size() const { return n_; }
  bool empty() const { return n_ == 0; }
  const std::array<double, kMatingTypes>& mean_log_z() const { return mean_log_z_; }
  std::span<const double> row(std::size_t i) const {
    return {z_.data() + i * kMatingTypes, kMatingTypes};
  }
  const std::vector<SimplexSample>& samples() const { return samples_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> z_;  // n x 9, row-major
  std::array<double, kMatingTypes> mean_log_z_{};
  std::vector<SimplexSample> samples_;
};

enum class KernelPolicy { kSerial, kParallel };

namespace kernels {

inline constexpr std::size_t kBlockSize = 256;

double q_data_reference(const FamilyCounts& y, const DiseaseModel& theta, const SampleSet& samples);
double q_data_serial(const LikelihoodKernel& kernel, const SampleSet& samples);
double q_data_parallel(const LikelihoodKernel& kernel, const SampleSet& samples);

double q_data(const LikelihoodKernel& kernel, const SampleSet& samples, KernelPolicy policy);

}  // namespace kernels
}  // namespace imprint
