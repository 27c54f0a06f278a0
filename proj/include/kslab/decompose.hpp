#pragma once

// Explicit KS-decompositions Phi = lambda Phi1 + (1 - lambda) Phi2 with Phi1
// KS and Phi2 co-KS, both unital, and the checks that certify them.

#include <string>
#include <variant>
#include <vector>

#include "kslab/certify.hpp"
#include "kslab/superop.hpp"

namespace kslab {

// Coefficients of R_a(X) = (alpha Tr X I - beta X) + (gamma Tr X I + delta X).
struct ReductionParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

// Psi_a = lambda Psi_beta + (1 - lambda) T with lambda * beta = a.
struct LambdaPlusParams {
  double lambda = 0.0;
  double beta = 0.0;
};

using DecompositionParams = std::variant<ReductionParams, LambdaPlusParams>;

struct DecompositionResult {
  std::string target;  // "reduction" or "lambda-plus-T"
  int d = 0;
  double a = 0.0;
  double lambda = 0.0;
  QuantumMap phi1;  // claimed KS
  QuantumMap phi2;  // claimed co-KS
  DecompositionParams params;
  double residual = 0.0;  // transfer_distance(lambda phi1 + (1 - lambda) phi2, target map)
};

// Threshold t(d) = (2d + 1 - sqrt(4d + 1)) / (2d) above which Psi_a = a Delta + (1 - a) T is KS.
double lambda_plus_T_threshold(int d);

// Psi_a for a in [0, 1]. For a >= t(d) the decomposition is trivial
// (lambda = 1, phi1 = Psi_a); otherwise lambda = a / t(d), phi1 = Psi_t(d).
// phi2 is always T; it carries zero weight when lambda = 1.
DecompositionResult decompose_lambda_plus_T(int d, double a);

// Feasible region of the free parameters (alpha, lambda) of the reduction
// decomposition: alpha in (0, 1/(d-a)) and
//   alpha d^2/(d+1) <= lambda <= min{alpha d, (d-1) alpha + (1-a)/(d-a)},  0 < lambda <= 1.
// Scans alpha on a uniform grid and reports the widest lambda interval.
struct ReductionFeasibility {
  bool feasible = false;
  double alpha = 0.0;       // grid alpha with the widest interval
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;   // lambda_hi - lambda_lo < 0 when infeasible
  int grid_points = 0;
  double width() const { return lambda_hi - lambda_lo; }
};

ReductionFeasibility reduction_feasibility(int d, double a, int grid_points = 4096);

// R_a for a in [0, 1]. a <= d/(d+1): trivial (lambda = 1, phi1 = R_a, phi2 =
// Delta with zero weight). d/(d+1) < a < 1: alpha = (1-a)/(d-a), lambda the
// midpoint of [alpha d^2/(d+1), alpha d]. a = 1 goes through
// reduction_feasibility and throws ConstructionError describing the result
// when no admissible (alpha, lambda) exists.
DecompositionResult decompose_reduction(int d, double a);

// Largest violation of the linear parameter identities of the decomposition:
//   reduction:   alpha + gamma = 1/(d-a), beta - delta = a/(d-a),
//                alpha d - beta = lambda, gamma d + delta = 1 - lambda
//   lambda-plus: lambda beta = a
double parameter_identity_residual(const DecompositionResult& r);

// With Phi = lambda phi1 + (1 - lambda) phi2 and A o B = AB + BA:
//   Phi(X^* o X) - Phi(X)^* o Phi(X) - lambda (1 - lambda) (phi1(X) - phi2(X))^* o (phi1(X) - phi2(X)).
ComplexMatrix jordan_defect(const QuantumMap& phi1, const QuantumMap& phi2, double lambda, const ComplexMatrix& x);

// Phi(X^* o X) - Phi(X)^* o Phi(X). Requires Phi(I) <= I (DomainError otherwise).
ComplexMatrix stormer_defect(const QuantumMap& phi, const ComplexMatrix& x);

struct DecompositionCheck {
  std::string name;  // "reconstruction", "phi1-ks", "phi2-co-ks", "jordan-psd"
  bool passed = false;
  double value = 0.0;  // residual or minimal eigenvalue
  std::string detail;
};

struct DecompositionReport {
  std::vector<DecompositionCheck> checks;
  bool passed() const;
};

inline constexpr int kJordanSamples = 100;
inline constexpr double kReconstructionTol = 1e-10;

// Four independent checks, run concurrently:
//   reconstruction residual against target <= 1e-10,
//   falsify_ks(phi1, 1) finds nothing, falsify_co_ks(phi2) finds nothing,
//   jordan_defect has minimal eigenvalue >= -violation_tol on 100 random X.
DecompositionReport verify_decomposition(const DecompositionResult& r, const QuantumMap& target,
                                         const SearchBudget& budget);

// The map a decomposition claims to reproduce.
QuantumMap decomposition_target(const DecompositionResult& r);

}  // namespace kslab
