#pragma once

// Genotype and trio combinatorics for a biallelic marker: Mendelian
// transmission, the multiplicative penetrance model with imprinting and
// maternal-effect terms, and the 15-row joint probability table.

#include <array>
#include <cstdint>
#include <map>
#include <string_view>

namespace imprint {

// Number of copies (0, 1 or 2) of the minor allele carried by one person.
class GenotypeCount {
 public:
  constexpr GenotypeCount() = default;
  explicit GenotypeCount(int copies);
  constexpr int copies() const { return copies_; }
  friend constexpr auto operator<=>(GenotypeCount, GenotypeCount) = default;

 private:
  int copies_ = 0;
};

// Exact probability p/q with small integer terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational operator+(const Rational& other) const;
  bool operator==(const Rational& other) const;
};

// Which parent transmitted the child's single minor-allele copy.
enum class AlleleOrigin : std::uint8_t {
  kNone,       // child is homozygous: no single copy to attribute
  kMaternal,
  kPaternal,
  kAmbiguous,  // both parents heterozygous, child heterozygous
};

// One of the 15 (mother, father, child) genotype combinations compatible
// with Mendelian inheritance. `transmission` is P(C=c | M=m, F=f).
struct TrioType {
  int index;  // 1..15
  int mother;
  int father;
  int child;
  Rational transmission;
  AlleleOrigin origin;

  int mating_index() const { return 3 * mother + father; }
};

inline constexpr int kTrioTypes = 15;
inline constexpr int kMatingTypes = 9;

// Canonical table ordering, type 1 = (0,0,0) ... type 15 = (2,2,2).
const std::array<TrioType, kTrioTypes>& trio_types();
const TrioType& trio_type(int index);  // 1-based
// Returns the type index (1..15) of a compatible (m,f,c), 0 when incompatible.
int trio_index_of(int mother, int father, int child);

enum class Parameter : std::uint8_t { kDelta, kR1, kR2, kRim, kS1, kS2 };
inline constexpr int kParameters = 6;
std::string_view parameter_name(Parameter p);
// Accepts the names printed by parameter_name, case-insensitively.
bool parse_parameter(std::string_view name, Parameter& out);

// Phenocopy rate and relative risks of the penetrance model.
struct DiseaseModel {
  double delta = 0.0067;
  double r1 = 1.0;
  double r2 = 1.0;
  double rim = 1.0;
  double s1 = 1.0;
  double s2 = 1.0;

  double get(Parameter p) const;
  void set(Parameter p, double value);
  std::array<double, kParameters> as_array() const;
  static DiseaseModel from_array(const std::array<double, kParameters>& values);

  // delta in (0,1), risks > 0; does not check penetrance bounds.
  bool has_valid_domain() const;
  static DiseaseModel null_model(double delta) { return DiseaseModel{delta, 1, 1, 1, 1, 1}; }
};

// Distribution over the 9 ordered (mother, father) genotype pairs; index 3*m+f.
struct MatingTypeDistribution {
  std::array<double, kMatingTypes> mu{};

  double operator()(int mother, int father) const { return mu[3 * mother + father]; }
  static MatingTypeDistribution uniform();
  // Throws ConfigError when entries are negative or do not sum to 1 within 1e-12.
  void validate() const;
};

// Mendelian segregation; the result maps child copies to P(C=c | m, f).
std::map<int, Rational> transmission(GenotypeCount mother, GenotypeCount father);

// Multiplicative risk factor with delta = 1 for a resolved parental origin.
double risk_multiplier(const DiseaseModel& theta, int mother, int child, bool maternal_origin);
// Origin-averaged multiplier used by the table (type 8 averages both origins).
double table_multiplier(const DiseaseModel& theta, const TrioType& trio);

// P(D=1 | M, F, C). Type 8 returns the origin-averaged value. Throws
// PenetranceOverflow if the value exceeds 1.
double penetrance(const DiseaseModel& theta, const TrioType& trio);
// Penetrance for a known parental origin of the child's single copy.
double penetrance_with_origin(const DiseaseModel& theta, int mother, int father, int child,
                              bool maternal_origin);

// P(D, M, F, C) for one table row.
double joint_probability(const DiseaseModel& theta, const MatingTypeDistribution& mu,
                         const TrioType& trio, bool affected);

// True iff every reachable penetrance, including both origin branches of
// type 8, is at most 1.
bool validate_penetrance_bounds(const DiseaseModel& theta);

}  // namespace imprint
