#pragma once

#include <cstdint>
#include <functional>

#include "kslab/matrix_core.hpp"
#include "kslab/random.hpp"

namespace kslab {

struct SearchBudget {
  int restarts = 32;
  int max_iters = 500;
  double step_init = 0.1;
  std::uint64_t seed = 0;
  double violation_tol = 1e-9;

  // Throws DomainError on restarts < 1, max_iters < 1, step_init <= 0 or
  // violation_tol <= 0.
  void validate() const;
  SearchBudget with_seed(std::uint64_t s) const {
    SearchBudget b = *this;
    b.seed = s;
    return b;
  }
};

struct BudgetUsage {
  int restarts = 0;
  long iterations = 0;
  long evaluations = 0;
};

// Smallest eigenpair of a Hermitian matrix. When the bottom eigenvalue is
// within `degeneracy_gap` of the next one the returned vector is a random unit
// vector in the (numerically) degenerate bottom eigenspace, i.e. a subgradient
// direction of lambda_min.
struct MinEigenpair {
  double value;
  ComplexVector vector;
};
MinEigenpair min_eigenpair(const ComplexMatrix& hermitian, Rng& rng, double degeneracy_gap = 1e-8);

// f(X) = lambda_min(D(X)) for a Hermitian-valued defect D that is a
// quadratic form in X, minimized over the HS unit sphere.
struct MinEigenObjective {
  // D(X), Hermitian.
  std::function<ComplexMatrix(const ComplexMatrix&)> defect;
  // Euclidean gradient G of X -> v^* D(X) v, normalized so that
  // v^* D(X + tE) v = v^* D(X) v + t Re Tr(G^* E) + O(t^2).
  std::function<ComplexMatrix(const ComplexMatrix& x, const ComplexVector& v)> gradient;
  // H_v with v^* D(X) v = vec(X)^* H_v vec(X).
  std::function<ComplexMatrix(const ComplexVector& v)> quadratic_form;

  double value(const ComplexMatrix& x) const;
};

struct SphereSearchResult {
  double best_value = 0.0;
  ComplexMatrix best_point;
  int best_restart = -1;
  BudgetUsage usage;
};

// Random-restart search. Each restart starts from a normalized complex
// Ginibre matrix (seed split by restart index) and runs two phases sharing
// max_iters:
//  1. alternating exact minimization: v <- bottom eigenvector of D(X), then
//     X <- bottom eigenvector of H_v. Monotone; stops when the value improves
//     by less than 1e-12 over 3 rounds.
//  2. projected gradient descent on the sphere along the tangent part of -G,
//     backtracking by halving from step_init, stopping when the line search
//     fails or progress is below 1e-12 over 10 iterations.
// Restarts run concurrently; the result is the minimum over restarts with ties
// broken by restart index, so it is independent of scheduling.
SphereSearchResult minimize_min_eigenvalue(const MinEigenObjective& f, Eigen::Index rows, Eigen::Index cols,
                                           const SearchBudget& budget);

// Runs body(i) for i in [0, n) on a pool of worker threads.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace kslab
