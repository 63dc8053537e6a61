#include "imprint/likelihood.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "imprint/errors.hpp"

namespace imprint {

long FamilyCounts::total(const TypeCounts& counts) {
  return std::accumulate(counts.begin(), counts.end(), 0L);
}

void FamilyCounts::validate() const {
  for (const TypeCounts* v : {&n1, &n0, &sn1, &sn0}) {
    for (std::size_t i = 0; i < v->size(); ++i) {
      if ((*v)[i] < 0) {
        throw ConfigError("negative count for trio type " + std::to_string(i + 1));
      }
    }
  }
  if (total(n1) + total(n0) <= 0) {
    throw ConfigError("family counts contain no case-parent or control-parent trio");
  }
}

std::uint64_t FamilyCounts::fingerprint() const {
  // FNV-1a over the 60 counts in declaration order.
  std::uint64_t h = 1469598103934665603ULL;
  for (const TypeCounts* v : {&n1, &n0, &sn1, &sn0}) {
    for (long c : *v) {
      auto u = static_cast<std::uint64_t>(c);
      for (int b = 0; b < 8; ++b) {
        h ^= (u >> (8 * b)) & 0xffU;
        h *= 1099511628211ULL;
      }
    }
  }
  return h;
}

double prevalence(const DiseaseModel& theta, const MatingTypeDistribution& mu) {
  double p = 0.0;
  for (const auto& t : trio_types()) p += joint_probability(theta, mu, t, true);
  return p;
}

double conditional_trio_prob(const DiseaseModel& theta, const MatingTypeDistribution& mu,
                             const TrioType& trio, bool affected) {
  const double prev = prevalence(theta, mu);
  if (!(prev > 0.0 && prev < 1.0)) throw DegenerateDenominator(prev);
  const double joint = joint_probability(theta, mu, trio, affected);
  return affected ? joint / prev : joint / (1.0 - prev);
}

namespace {

double count_log(long count, double prob, int trio_index, const char* term) {
  if (count == 0) return 0.0;
  if (!(prob > 0.0)) throw LogOfZero(trio_index, count, term);
  return static_cast<double>(count) * std::log(prob);
}

}  // namespace

double full_log_likelihood(const FamilyCounts& y, const DiseaseModel& theta,
                           const MatingTypeDistribution& mu) {
  const double prev = prevalence(theta, mu);
  if (!(prev > 0.0 && prev < 1.0)) throw DegenerateDenominator(prev);
  double ll = 0.0;
  for (const auto& t : trio_types()) {
    const auto i = static_cast<std::size_t>(t.index - 1);
    const double pen = penetrance(theta, t);
    ll += count_log(y.n1[i], joint_probability(theta, mu, t, true) / prev, t.index, "case");
    ll += count_log(y.n0[i], joint_probability(theta, mu, t, false) / (1.0 - prev), t.index,
                    "control");
    ll += count_log(y.sn1[i], pen, t.index, "affected-sibling");
    ll += count_log(y.sn0[i], 1.0 - pen, t.index, "unaffected-sibling");
  }
  return ll;
}

LikelihoodKernel::LikelihoodKernel(const FamilyCounts& y, const DiseaseModel& theta) {
  for (const auto& t : trio_types()) {
    const auto i = static_cast<std::size_t>(t.index - 1);
    const auto mf = static_cast<std::size_t>(t.mating_index());
    const double pen = penetrance(theta, t);
    const double tf = t.transmission.value();
    affected_[mf] += tf * pen;
    unaffected_[mf] += tf * (1.0 - pen);
    mating_counts_[mf] += static_cast<double>(y.n1[i] + y.n0[i]);
    constant_ += count_log(y.n1[i], tf * pen, t.index, "case");
    constant_ += count_log(y.n0[i], tf * (1.0 - pen), t.index, "control");
    constant_ += count_log(y.sn1[i], pen, t.index, "affected-sibling");
    constant_ += count_log(y.sn0[i], 1.0 - pen, t.index, "unaffected-sibling");
  }
  n_case_ = static_cast<double>(FamilyCounts::total(y.n1));
  n_control_ = static_cast<double>(FamilyCounts::total(y.n0));
}

double LikelihoodKernel::log_likelihood(std::span<const double, kMatingTypes> z,
                                        std::span<const double, kMatingTypes> log_z) const {
  double ll = constant_;
  double az = 0.0;
  double bz = 0.0;
  for (std::size_t k = 0; k < kMatingTypes; ++k) {
    if (mating_counts_[k] != 0.0) ll += mating_counts_[k] * log_z[k];
    az += affected_[k] * z[k];
    bz += unaffected_[k] * z[k];
  }
  if (n_case_ > 0.0) ll -= n_case_ * std::log(az);
  if (n_control_ > 0.0) ll -= n_control_ * std::log(bz);
  return ll;
}

double LikelihoodKernel::log_likelihood(const MatingTypeDistribution& mu) const {
  std::array<double, kMatingTypes> log_z{};
  for (std::size_t k = 0; k < kMatingTypes; ++k) {
    if (mating_counts_[k] != 0.0 && !(mu.mu[k] > 0.0)) {
      throw LogOfZero(0, static_cast<long>(mating_counts_[k]),
                      "trio(s) of mating type " + std::to_string(k / 3) + std::to_string(k % 3));
    }
    log_z[k] = mu.mu[k] > 0.0 ? std::log(mu.mu[k]) : 0.0;
  }
  return log_likelihood(mu.mu, log_z);
}

}  // namespace imprint
