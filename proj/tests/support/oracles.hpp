#pragma once

// Independent reference computations used as test oracles. Everything here
// is derived from allele-level enumeration (each parent passes on one allele,
// a minor allele with probability copies/2), never from the trio table.

#include <array>
#include <cmath>
#include <vector>

#include "imprint/genetics.hpp"
#include "imprint/likelihood.hpp"

namespace oracle {

using imprint::DiseaseModel;
using imprint::FamilyCounts;
using imprint::MatingTypeDistribution;

inline double pass_minor(int copies, int passed) {
  const double p = copies / 2.0;
  return passed ? p : 1.0 - p;
}

inline double penetrance(const DiseaseModel& t, int m, int c, bool maternal) {
  double pen = t.delta;
  if (c == 1) pen *= t.r1;
  if (c == 2) pen *= t.r2;
  if (c == 1 && maternal) pen *= t.rim;
  if (m == 1) pen *= t.s1;
  if (m == 2) pen *= t.s2;
  return pen;
}

// P(C=c | m, f) and P(D=1, C=c | m, f) by enumerating transmitted alleles.
struct ChildTerms {
  double transmission = 0.0;
  double affected = 0.0;
};

inline ChildTerms child_terms(const DiseaseModel& t, int m, int f, int c) {
  ChildTerms out;
  for (int tm = 0; tm <= 1; ++tm) {
    for (int tf = 0; tf <= 1; ++tf) {
      if (tm + tf != c) continue;
      const double p = pass_minor(m, tm) * pass_minor(f, tf);
      out.transmission += p;
      out.affected += p * penetrance(t, m, c, c == 1 && tm == 1);
    }
  }
  return out;
}

inline double joint(const DiseaseModel& t, const MatingTypeDistribution& mu, int m, int f, int c,
                    bool affected) {
  const ChildTerms k = child_terms(t, m, f, c);
  const double mf = mu.mu[static_cast<std::size_t>(3 * m + f)];
  return mf * (affected ? k.affected : k.transmission - k.affected);
}

inline double prevalence(const DiseaseModel& t, const MatingTypeDistribution& mu) {
  double prev = 0.0;
  for (int m = 0; m < 3; ++m)
    for (int f = 0; f < 3; ++f)
      for (int c = 0; c < 3; ++c) prev += joint(t, mu, m, f, c, true);
  return prev;
}

// log of the literal product over individual families of
// P(m,f,c | D) for probands and P(D | m,f,c) for siblings.
inline double log_likelihood_product(const FamilyCounts& y, const DiseaseModel& t,
                                     const MatingTypeDistribution& mu) {
  const double prev = oracle::prevalence(t, mu);
  double product = 1.0;
  for (const auto& trio : imprint::trio_types()) {
    const auto k = static_cast<std::size_t>(trio.index - 1);
    const int m = trio.mother, f = trio.father, c = trio.child;
    const ChildTerms terms = child_terms(t, m, f, c);
    const double pen = terms.affected / terms.transmission;
    for (long i = 0; i < y.n1[k]; ++i) product *= joint(t, mu, m, f, c, true) / prev;
    for (long i = 0; i < y.n0[k]; ++i) product *= joint(t, mu, m, f, c, false) / (1.0 - prev);
    for (long i = 0; i < y.sn1[k]; ++i) product *= pen;
    for (long i = 0; i < y.sn0[k]; ++i) product *= 1.0 - pen;
  }
  return std::log(product);
}

}  // namespace oracle
