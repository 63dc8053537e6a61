#include "imprint/genetics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "imprint/errors.hpp"

namespace imprint {

GenotypeCount::GenotypeCount(int copies) : copies_(copies) {
  if (copies < 0 || copies > 2) {
    throw ConfigError("genotype copy count must be 0, 1 or 2, got " + std::to_string(copies));
  }
}

Rational Rational::operator+(const Rational& other) const {
  Rational r{num * other.den + other.num * den, den * other.den};
  const auto g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

bool Rational::operator==(const Rational& other) const { return num * other.den == other.num * den; }

namespace {

constexpr Rational kOne{1, 1};
constexpr Rational kHalf{1, 2};
constexpr Rational kQuarter{1, 4};

using O = AlleleOrigin;

// Type 8 carries P(C=1|1,1) = 1/2; the table's printed 1/4 factor pairs with
// the (1+Rim) sum of both origins, which is the same joint probability.
constexpr std::array<TrioType, kTrioTypes> kTable{{
    {1, 0, 0, 0, kOne, O::kNone},
    {2, 0, 1, 0, kHalf, O::kNone},
    {3, 0, 1, 1, kHalf, O::kPaternal},
    {4, 0, 2, 1, kOne, O::kPaternal},
    {5, 1, 0, 0, kHalf, O::kNone},
    {6, 1, 0, 1, kHalf, O::kMaternal},
    {7, 1, 1, 0, kQuarter, O::kNone},
    {8, 1, 1, 1, kHalf, O::kAmbiguous},
    {9, 1, 1, 2, kQuarter, O::kNone},
    {10, 1, 2, 1, kHalf, O::kPaternal},
    {11, 1, 2, 2, kHalf, O::kNone},
    {12, 2, 0, 1, kOne, O::kMaternal},
    {13, 2, 1, 1, kHalf, O::kMaternal},
    {14, 2, 1, 2, kHalf, O::kNone},
    {15, 2, 2, 2, kOne, O::kNone},
}};

}  // namespace

const std::array<TrioType, kTrioTypes>& trio_types() { return kTable; }

const TrioType& trio_type(int index) {
  if (index < 1 || index > kTrioTypes) {
    throw ConfigError("trio type index must be in 1..15, got " + std::to_string(index));
  }
  return kTable[static_cast<std::size_t>(index - 1)];
}

int trio_index_of(int mother, int father, int child) {
  for (const auto& t : kTable) {
    if (t.mother == mother && t.father == father && t.child == child) return t.index;
  }
  return 0;
}

std::string_view parameter_name(Parameter p) {
  switch (p) {
    case Parameter::kDelta: return "delta";
    case Parameter::kR1: return "r1";
    case Parameter::kR2: return "r2";
    case Parameter::kRim: return "rim";
    case Parameter::kS1: return "s1";
    case Parameter::kS2: return "s2";
  }
  return "?";
}

bool parse_parameter(std::string_view name, Parameter& out) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (int i = 0; i < kParameters; ++i) {
    const auto p = static_cast<Parameter>(i);
    if (lower == parameter_name(p)) {
      out = p;
      return true;
    }
  }
  return false;
}

double DiseaseModel::get(Parameter p) const { return as_array()[static_cast<std::size_t>(p)]; }

void DiseaseModel::set(Parameter p, double value) {
  auto values = as_array();
  values[static_cast<std::size_t>(p)] = value;
  *this = from_array(values);
}

std::array<double, kParameters> DiseaseModel::as_array() const {
  return {delta, r1, r2, rim, s1, s2};
}

DiseaseModel DiseaseModel::from_array(const std::array<double, kParameters>& v) {
  return DiseaseModel{v[0], v[1], v[2], v[3], v[4], v[5]};
}

bool DiseaseModel::has_valid_domain() const {
  if (!(delta > 0.0 && delta < 1.0)) return false;
  for (double r : {r1, r2, rim, s1, s2}) {
    if (!(r > 0.0) || !std::isfinite(r)) return false;
  }
  return true;
}

MatingTypeDistribution MatingTypeDistribution::uniform() {
  MatingTypeDistribution out;
  out.mu.fill(1.0 / kMatingTypes);
  return out;
}

void MatingTypeDistribution::validate() const {
  double total = 0.0;
  for (double v : mu) {
    if (!(v >= 0.0)) throw ConfigError("mating type probabilities must be nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("mating type probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

std::map<int, Rational> transmission(GenotypeCount mother, GenotypeCount father) {
  std::map<int, Rational> out;
  for (const auto& t : kTable) {
    if (t.mother == mother.copies() && t.father == father.copies()) {
      out[t.child] = t.transmission;
    }
  }
  return out;
}

double risk_multiplier(const DiseaseModel& theta, int mother, int child, bool maternal_origin) {
  double m = 1.0;
  if (child == 1) {
    m *= theta.r1;
    if (maternal_origin) m *= theta.rim;
  } else if (child == 2) {
    m *= theta.r2;
  }
  if (mother == 1) {
    m *= theta.s1;
  } else if (mother == 2) {
    m *= theta.s2;
  }
  return m;
}

double table_multiplier(const DiseaseModel& theta, const TrioType& trio) {
  switch (trio.origin) {
    case AlleleOrigin::kMaternal:
      return risk_multiplier(theta, trio.mother, trio.child, true);
    case AlleleOrigin::kAmbiguous:
      return 0.5 * (risk_multiplier(theta, trio.mother, trio.child, true) +
                    risk_multiplier(theta, trio.mother, trio.child, false));
    case AlleleOrigin::kNone:
    case AlleleOrigin::kPaternal:
      break;
  }
  return risk_multiplier(theta, trio.mother, trio.child, false);
}

double penetrance(const DiseaseModel& theta, const TrioType& trio) {
  const double p = theta.delta * table_multiplier(theta, trio);
  if (p > 1.0) throw PenetranceOverflow(trio.index, p);
  return p;
}

double penetrance_with_origin(const DiseaseModel& theta, int mother, int father, int child,
                              bool maternal_origin) {
  const double p = theta.delta * risk_multiplier(theta, mother, child, maternal_origin);
  if (p > 1.0) throw PenetranceOverflow(trio_index_of(mother, father, child), p);
  return p;
}

double joint_probability(const DiseaseModel& theta, const MatingTypeDistribution& mu,
                         const TrioType& trio, bool affected) {
  const double pen = penetrance(theta, trio);
  const double base = mu.mu[static_cast<std::size_t>(trio.mating_index())] * trio.transmission.value();
  return affected ? base * pen : base * (1.0 - pen);
}

bool validate_penetrance_bounds(const DiseaseModel& theta) {
  for (const auto& t : kTable) {
    const bool both = t.origin == AlleleOrigin::kAmbiguous;
    const double a = theta.delta * risk_multiplier(theta, t.mother, t.child,
                                                    t.origin == AlleleOrigin::kMaternal);
    if (!(a <= 1.0)) return false;
    if (both && !(theta.delta * risk_multiplier(theta, t.mother, t.child, true) <= 1.0)) {
      return false;
    }
  }
  return true;
}

}  // namespace imprint
