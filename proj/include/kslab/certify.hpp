#pragma once

// Defect operators for the Kadison-Schwarz family of operator inequalities
// and optimization-based falsifiers searching for violations.
//
// A falsifier is one-sided: a Violated verdict carries a witness that can be
// re-evaluated independently; NoViolationFound only means the search budget
// did not turn up a violation.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kslab/block_operator.hpp"
#include "kslab/optimizer.hpp"
#include "kslab/superop.hpp"

namespace kslab {

// ---------------------------------------------------------------------------
// Defects

// Phi(X^*X) - Phi(X)^*Phi(X).
ComplexMatrix ks_defect(const QuantumMap& phi, const ComplexMatrix& x);

// Phi(X^*X) - Phi(X)Phi(X)^*.
ComplexMatrix co_ks_defect(const QuantumMap& phi, const ComplexMatrix& x);

// sum_ij E_ij (x) [Phi(x_i^* x_j) - Phi(x_i)^* Phi(x_j)] as a kd x kd matrix.
ComplexMatrix kks_block_defect(const QuantumMap& phi, const std::vector<ComplexMatrix>& tuple);

// Phi_k(X^*X) - Phi_k(X)^*Phi_k(X) with Phi_k = id_k (x) Phi.
ComplexMatrix amplified_ks_defect(const QuantumMap& phi, int k, const BlockOperator& x);

// Tr_2(X^*X) - Tr_2(Phi_k(X)^*Phi_k(X)), a k x k matrix. Equivalent to the
// Delta_k form of the (Phi-k) condition since Delta_k(Z) = Tr_2(Z) (x) I / d.
ComplexMatrix phi_k_defect(const QuantumMap& phi, int k, const BlockOperator& x);

// (Phi(Y) - Phi(X)^*Phi(X), Phi(Y) - Phi(X)Phi(X)^*). Requires Y >= X^*X and
// Y >= XX^* within kPsdTol; throws DomainError naming the failing inequality.
std::pair<ComplexMatrix, ComplexMatrix> strong_kadison_defects(const QuantumMap& phi,
                                                               const ComplexMatrix& x,
                                                               const ComplexMatrix& y);

// ---------------------------------------------------------------------------
// Objectives minimized by the falsifiers: defect, gradient of v^* D(X) v and
// the Hermitian H_v with v^* D(X) v = vec(X)^* H_v vec(X).

MinEigenObjective ks_objective(const QuantumMap& phi, int k);
MinEigenObjective co_ks_objective(const QuantumMap& phi);
MinEigenObjective phi_k_objective(const QuantumMap& phi, int k);

// ---------------------------------------------------------------------------
// Verdicts

enum class Verdict { Violated, NoViolationFound };

std::string_view verdict_name(Verdict v);

// Rank-<=k vector psi = sum_i u_i (x) v_i, with u_i, v_i the columns of u, v.
// The first tensor factor is the reference system of the Choi matrix.
struct SchmidtWitness {
  ComplexMatrix u;
  ComplexMatrix v;

  ComplexVector state() const;  // normalized
};

using Witness = std::variant<BlockOperator, SchmidtWitness>;

struct CertificateVerdict {
  std::string property;  // "ks", "co-ks", "k-positivity", "phi-k"
  int k = 1;
  Verdict verdict = Verdict::NoViolationFound;
  double worst_value = 0.0;        // most negative defect eigenvalue found
  std::optional<Witness> witness;  // present iff Violated
  BudgetUsage budget_used;
  std::uint64_t seed = 0;
  double violation_tol = 1e-9;
  std::vector<std::string> warnings;

  bool violated() const { return verdict == Verdict::Violated; }
};

// ---------------------------------------------------------------------------
// Witness evaluation. These recompute the defect from scratch and are what a
// verdict's worst_value is reported from.

double evaluate_ks(const QuantumMap& phi, int k, const BlockOperator& x);
double evaluate_co_ks(const QuantumMap& phi, const BlockOperator& x);
double evaluate_phi_k(const QuantumMap& phi, int k, const BlockOperator& x);
double evaluate_k_positivity(const QuantumMap& phi, const SchmidtWitness& w);

// Re-evaluates the stored witness of a Violated verdict against phi.
double reevaluate(const QuantumMap& phi, const CertificateVerdict& v);

// ---------------------------------------------------------------------------
// Falsifiers

// Minimizes lambda_min(amplified_ks_defect) over ||X||_HS = 1.
CertificateVerdict falsify_ks(const QuantumMap& phi, int k, const SearchBudget& budget);

// Minimizes lambda_min(co_ks_defect) over ||X||_HS = 1.
CertificateVerdict falsify_co_ks(const QuantumMap& phi, const SearchBudget& budget);

// Minimizes <psi|C_phi|psi> over unit psi of Schmidt rank <= k by alternating
// exact minimization over the two Schmidt factors. Requires 1 <= k <= d.
CertificateVerdict falsify_k_positivity(const QuantumMap& phi, int k, const SearchBudget& budget);

// Minimizes lambda_min(phi_k_defect) over ||X||_HS = 1.
CertificateVerdict check_phi_k_condition(const QuantumMap& phi, int k, const SearchBudget& budget);

// A k-KS witness X converted to a k-tuple whose block defect is at most the
// amplified defect value (rows of X scaled by sqrt(k)). Returns the tuple
// and the minimal eigenvalue of its block defect.
std::pair<std::vector<ComplexMatrix>, double> tuple_from_block_witness(const QuantumMap& phi,
                                                                      const BlockOperator& x);

// ---------------------------------------------------------------------------
// Delta_k identities

struct DeltaLemmaReport {
  int k = 1;
  int d = 1;
  int samples = 0;
  double projector_residual = 0.0;     // ||T_k^2 - T_k|| for the amplified transfer matrix
  double multiplicative_residual = 0.0;  // max ||Delta_k(D^*D) - D^*D||, D = Delta_k(X)
  double annihilation_residual = 0.0;  // max ||Delta_k(Y Delta_k(X))||, Y = X - Delta_k(X)
  double kernel_residual = 0.0;        // max ||Delta_k(Y)||
};

DeltaLemmaReport check_delta_lemma(int k, int d, int samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// (k+1)-positive unital maps are k-KS: sampled UTP CP maps must not violate.

struct SampledVerdict {
  std::uint64_t seed;
  int n_kraus;
  CertificateVerdict verdict;
};

struct KpImpliesKksReport {
  int d = 0;
  int k = 0;
  std::vector<SampledVerdict> samples;
  int violations = 0;
  bool passed() const { return violations == 0; }
};

KpImpliesKksReport check_kp_implies_kks(int d, int k, std::uint64_t seed, const SearchBudget& budget,
                                        int n_samples = 20);

}  // namespace kslab
