#pragma once

// Linear maps on B(H_d). The canonical representation is the d^2 x d^2
// transfer matrix T acting on column-stacked operators: vec(Phi(X)) = T vec(X).
// Choi and Kraus forms are conversions.

#include <string>
#include <vector>

#include "kslab/block_operator.hpp"
#include "kslab/matrix_core.hpp"

namespace kslab {

inline constexpr double kStructureTol = 1e-10;

class QuantumMap {
 public:
  static QuantumMap from_transfer(int d, ComplexMatrix transfer, std::string label = "");
  // Unnormalized Choi matrix C = sum_ij E_ij (x) Phi(E_ij).
  static QuantumMap from_choi(int d, const ComplexMatrix& choi, std::string label = "");
  // Phi(X) = sum_i K_i X K_i^*.
  static QuantumMap from_kraus(const std::vector<ComplexMatrix>& kraus, std::string label = "");

  int d() const { return d_; }
  const ComplexMatrix& transfer() const { return transfer_; }
  const std::string& label() const { return label_; }

  // Structural flags are computed once at construction.
  bool is_unital() const { return unital_; }
  bool is_trace_preserving() const { return trace_preserving_; }
  bool is_hermiticity_preserving() const { return hermiticity_preserving_; }
  bool is_utp() const { return unital_ && trace_preserving_; }

  ComplexMatrix operator()(const ComplexMatrix& x) const;

  QuantumMap relabeled(std::string label) const;

 private:
  QuantumMap(int d, ComplexMatrix transfer, std::string label);

  int d_;
  ComplexMatrix transfer_;
  std::string label_;
  bool unital_ = false;
  bool trace_preserving_ = false;
  bool hermiticity_preserving_ = false;
};

ComplexMatrix apply(const QuantumMap& phi, const ComplexMatrix& x);

// id_k (x) Phi acting block-wise on M_k(B(H_d)).
class AmplifiedMap {
 public:
  AmplifiedMap(const QuantumMap& phi, int k);

  int k() const { return k_; }
  int d() const { return phi_.d(); }
  const QuantumMap& base() const { return phi_; }

  // x is kd x kd; block (i, j) of the result is Phi(x_ij).
  ComplexMatrix operator()(const ComplexMatrix& x) const;
  BlockOperator operator()(const BlockOperator& x) const;

 private:
  QuantumMap phi_;
  int k_;
};

AmplifiedMap amplify(const QuantumMap& phi, int k);

// (kd)^2 x (kd)^2 transfer matrix of id_k (x) Phi.
ComplexMatrix amplified_transfer(const QuantumMap& phi, int k);

ComplexMatrix choi(const QuantumMap& phi);

bool is_completely_positive(const QuantumMap& phi, double tol = kPsdTol);

// Kraus operators from the Choi spectral decomposition. Throws
// HypothesisError when the map is not CP within tol.
std::vector<ComplexMatrix> kraus_operators(const QuantumMap& phi, double tol = kPsdTol);

// (dual(A), B)_HS = (A, Phi(B))_HS; the transfer matrix is T^*.
QuantumMap hs_dual(const QuantumMap& phi);

// Operator norm of Phi with respect to the HS norm (largest singular value of T).
double hs_norm(const QuantumMap& phi);
bool is_hs_contraction(const QuantumMap& phi, double tol = kStructureTol);

// (outer o inner)(X) = outer(inner(X)).
QuantumMap compose(const QuantumMap& outer, const QuantumMap& inner);

QuantumMap operator+(const QuantumMap& a, const QuantumMap& b);
QuantumMap operator-(const QuantumMap& a, const QuantumMap& b);
QuantumMap operator*(double s, const QuantumMap& a);

// s * Phi with s chosen so that hs_norm equals target.
QuantumMap rescale_hs_norm(const QuantumMap& phi, double target);

double transfer_distance(const QuantumMap& a, const QuantumMap& b);

}  // namespace kslab
