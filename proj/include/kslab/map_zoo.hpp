#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kslab/superop.hpp"

namespace kslab {

QuantumMap identity_map(int d);
QuantumMap transposition(int d);

// X -> Tr(X) I / d.
QuantumMap depolarizing(int d);

// R_a(X) = (Tr(X) I - a X) / (d - a), defined for a < d.
QuantumMap reduction(int d, double a);

// (d * Delta - a * base) / (d - a). base must be unital and trace-preserving.
QuantumMap lambda_minus(const QuantumMap& base, double a);

// a * Delta + (1 - a) * base, any real a. base must be unital and
// trace-preserving.
QuantumMap lambda_plus(const QuantumMap& base, double a);

// X -> U phi(V X V^*) U^*.
QuantumMap unitary_sandwich(const QuantumMap& phi, const ComplexMatrix& u, const ComplexMatrix& v);

// Random unital trace-preserving CP map with n_kraus Kraus operators.
// Deterministic in (d, seed, n_kraus).
QuantumMap sample_utp_cp(int d, std::uint64_t seed, int n_kraus);

// Number of normalization sweeps the sampler allows before giving up.
inline constexpr int kSamplerMaxSweeps = 500;

// Upper end of the k-KS interval for lambda_minus: d / (kd + 1). Needs 1 <= k <= d.
double bound_lambda_minus(int d, int k);

// (lower, upper) roots of a/(kd) - (1 - a)^2 = 0.
std::pair<double, double> bounds_lambda_plus(int d, int k);

enum class Family { Delta, Reduction, LambdaMinus, LambdaPlus, Identity, Transpose, RandomUtp };

std::string_view family_name(Family f);
std::optional<Family> parse_family(std::string_view name);
const std::vector<std::string>& family_names();

struct FamilyParams {
  Family family = Family::Delta;
  int d = 2;
  double a = 0.0;
  int k_target = 1;
  std::optional<QuantumMap> base;  // used by lambda-minus / lambda-plus
  std::uint64_t seed = 0;          // used by random-utp
  int n_kraus = 2;                 // used by random-utp
};

QuantumMap build_family(const FamilyParams& p);

}  // namespace kslab
