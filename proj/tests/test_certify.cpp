#include <cmath>

#include "doctest.h"
#include "kslab/certify.hpp"
#include "kslab/errors.hpp"
#include "kslab/map_zoo.hpp"
#include "kslab/random.hpp"

using namespace kslab;

namespace {

SearchBudget budget(std::uint64_t seed, int restarts = 8) {
  SearchBudget b;
  b.restarts = restarts;
  b.seed = seed;
  return b;
}

// Every verdict must satisfy the structural invariants: sign vs tolerance,
// witness presence, and reproducibility of worst_value from the witness.
void check_verdict_invariants(const QuantumMap& phi, const CertificateVerdict& v) {
  if (v.violated()) {
    CHECK(v.worst_value < -v.violation_tol);
    REQUIRE(v.witness.has_value());
    CHECK(std::abs(reevaluate(phi, v) - v.worst_value) < 1e-8);
  } else {
    CHECK(v.worst_value >= -v.violation_tol);
  }
}

}  // namespace

TEST_CASE("ks_defect examples") {
  Rng rng(1);
  const ComplexMatrix x = ginibre(3, 3, rng);
  CHECK(ks_defect(identity_map(3), x).norm() < 1e-13);

  CHECK((ks_defect(depolarizing(2), matrix_unit(2, 0, 1)) - 0.5 * ComplexMatrix::Identity(2, 2)).norm() < 1e-15);

  // Positive unital maps satisfy the inequality on Hermitian inputs.
  for (int s = 0; s < 20; ++s) {
    const ComplexMatrix h = random_hermitian(3, rng);
    CHECK(min_eigenvalue(ks_defect(transposition(3), h)) > -1e-12);
    CHECK(min_eigenvalue(ks_defect(reduction(3, 1.0), h)) > -1e-12);
  }
  CHECK_THROWS_AS(ks_defect(identity_map(2), ComplexMatrix::Identity(3, 3)), DimensionError);
}

TEST_CASE("co_ks_defect examples") {
  CHECK(co_ks_defect(transposition(2), matrix_unit(2, 0, 1)).norm() < 1e-15);
  const ComplexMatrix e = co_ks_defect(identity_map(2), matrix_unit(2, 0, 1));
  CHECK((e - (matrix_unit(2, 1, 1) - matrix_unit(2, 0, 0))).norm() < 1e-15);

  // co-KS of Phi is the transpose of KS of T o Phi.
  Rng rng(2);
  const QuantumMap phi = sample_utp_cp(3, 5, 2);
  const QuantumMap t = transposition(3);
  const QuantumMap tphi = compose(t, phi);
  for (int s = 0; s < 10; ++s) {
    const ComplexMatrix x = ginibre(3, 3, rng);
    const ComplexMatrix lhs = co_ks_defect(phi, x);
    const ComplexMatrix rhs = ks_defect(tphi, x).transpose();
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("kks and amplified defects") {
  Rng rng(3);
  const std::vector<ComplexMatrix> pair = {ginibre(3, 3, rng), ginibre(3, 3, rng)};
  CHECK(kks_block_defect(identity_map(3), pair).norm() < 1e-12);
  CHECK(kks_block_defect(identity_map(3), {ComplexMatrix::Zero(3, 3), ComplexMatrix::Zero(3, 3)}).norm() == 0.0);

  const QuantumMap phi = sample_utp_cp(3, 6, 3);
  const ComplexMatrix a = ginibre(3, 3, rng);
  CHECK((kks_block_defect(phi, {a}) - ks_defect(phi, a)).norm() < 1e-13);

  // Single-block reduction.
  const BlockOperator xa(2, 3, kron(matrix_unit(2, 0, 0), a));
  CHECK((amplified_ks_defect(phi, 2, xa) - kron(matrix_unit(2, 0, 0), ks_defect(phi, a))).norm() < 1e-12);

  const BlockOperator xr(2, 3, ginibre(6, 6, rng));
  CHECK(amplified_ks_defect(identity_map(3), 2, xr).norm() < 1e-12);
  CHECK_THROWS_AS(amplified_ks_defect(phi, 3, xr), DimensionError);

  // A unital 2-KS map gives a PSD 2x2 block defect.
  for (int s = 0; s < 10; ++s) {
    const std::vector<ComplexMatrix> t = {ginibre(3, 3, rng), ginibre(3, 3, rng)};
    CHECK(min_eigenvalue(kks_block_defect(phi, t)) > -1e-10);
  }
}

TEST_CASE("strong Kadison defects") {
  Rng rng(4);
  for (int s = 0; s < 10; ++s) {
    const ComplexMatrix x = ginibre(3, 3, rng);
    const ComplexMatrix y = x.adjoint() * x + x * x.adjoint();
    for (const QuantumMap& phi : {depolarizing(3), transposition(3), identity_map(3),
                                  0.5 * transposition(3) + 0.5 * identity_map(3)}) {
      const auto [d1, d2] = strong_kadison_defects(phi, x, y);
      CHECK(min_eigenvalue(d1) > -1e-10);
      CHECK(min_eigenvalue(d2) > -1e-10);
    }
  }
  const ComplexMatrix h = random_hermitian(3, rng);
  CHECK(strong_kadison_defects(identity_map(3), h, h * h).first.norm() < 1e-12);
  CHECK_THROWS_AS(strong_kadison_defects(identity_map(2), matrix_unit(2, 0, 1), matrix_unit(2, 0, 0)), DomainError);
}

TEST_CASE("falsify_ks examples") {
  const auto ok = falsify_ks(reduction(2, 0.5), 1, budget(1));
  CHECK_FALSE(ok.violated());
  check_verdict_invariants(reduction(2, 0.5), ok);

  const auto bad = falsify_ks(reduction(2, 0.9), 1, budget(2));
  CHECK(bad.violated());
  check_verdict_invariants(reduction(2, 0.9), bad);

  for (int k : {1, 2}) CHECK_FALSE(falsify_ks(identity_map(3), k, budget(3)).violated());

  // Non-unital input triggers a warning but still runs.
  std::vector<ComplexMatrix> ks = {matrix_unit(2, 0, 0), matrix_unit(2, 0, 1)};
  const auto warned = falsify_ks(QuantumMap::from_kraus(ks), 1, budget(4));
  CHECK_FALSE(warned.warnings.empty());
  CHECK_THROWS_AS(falsify_ks(identity_map(2), 0, budget(4)), DomainError);
}

TEST_CASE("falsify_co_ks examples") {
  CHECK_FALSE(falsify_co_ks(transposition(3), budget(5)).violated());
  CHECK_FALSE(falsify_co_ks(depolarizing(3), budget(5)).violated());

  const auto v = falsify_co_ks(identity_map(2), budget(6));
  REQUIRE(v.violated());
  check_verdict_invariants(identity_map(2), v);
  CHECK(v.worst_value == doctest::Approx(-1.0).epsilon(1e-6));
  // The optimum is rank one, of the form u w^* with u orthogonal to w.
  const ComplexMatrix x = std::get<BlockOperator>(*v.witness).data();
  Eigen::JacobiSVD<ComplexMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  CHECK(svd.singularValues()(1) < 1e-4);
  const ComplexVector u = svd.matrixU().col(0);
  const ComplexVector w = svd.matrixV().col(0);
  CHECK(std::abs(u.dot(w)) < 1e-4);
}

TEST_CASE("falsify_k_positivity examples") {
  const auto v1 = falsify_k_positivity(reduction(3, 0.6), 2, budget(7));
  CHECK(v1.violated());
  check_verdict_invariants(reduction(3, 0.6), v1);
  CHECK(std::get<SchmidtWitness>(*v1.witness).u.cols() == 2);

  CHECK_FALSE(falsify_k_positivity(reduction(3, 0.3), 3, budget(8)).violated());

  const auto v3 = falsify_k_positivity(transposition(2), 2, budget(9));
  CHECK(v3.violated());
  CHECK(v3.worst_value == doctest::Approx(-1.0).epsilon(1e-6));

  CHECK_THROWS_AS(falsify_k_positivity(identity_map(2), 3, budget(9)), DomainError);
  CHECK_THROWS_AS(falsify_k_positivity(identity_map(2), 0, budget(9)), DomainError);
}

TEST_CASE("check_phi_k_condition examples") {
  for (int k : {1, 2, 3}) CHECK_FALSE(check_phi_k_condition(transposition(2), k, budget(10)).violated());

  const auto v = check_phi_k_condition(2.0 * identity_map(2), 1, budget(11));
  REQUIRE(v.violated());
  check_verdict_invariants(2.0 * identity_map(2), v);
  // At X = I / sqrt(d): Tr(X^*X) - Tr(4 X^*X) = -3.
  CHECK(v.worst_value == doctest::Approx(-3.0).epsilon(1e-6));
}

TEST_CASE("HS contractions satisfy (Phi-k)") {
  Rng rng(12);
  for (int s = 0; s < 6; ++s) {
    const int d = 2 + s % 2;
    const QuantumMap phi = rescale_hs_norm(QuantumMap::from_choi(d, random_hermitian(d * d, rng)), 0.99);
    for (int k : {1, 2}) {
      const auto v = check_phi_k_condition(phi, k, budget(100 + s, 4));
      CHECK_FALSE(v.violated());
      check_verdict_invariants(phi, v);
    }
  }
}

TEST_CASE("k-KS implies (Phi-k) on sampled UTP maps") {
  for (int s = 0; s < 4; ++s) {
    const QuantumMap phi = sample_utp_cp(3, 300 + s, 1 + s);
    for (int k : {1, 2}) {
      if (falsify_ks(phi, k, budget(s, 4)).violated()) continue;
      CHECK_FALSE(check_phi_k_condition(phi, k, budget(s, 4)).violated());
    }
  }
}

TEST_CASE("block witnesses convert to tuple witnesses") {
  // Lambda_-(id) at d=3 and a=0.6 is 1-KS but not 2-KS.
  const QuantumMap phi = lambda_minus(identity_map(3), 0.6);
  const auto v = falsify_ks(phi, 2, budget(13));
  REQUIRE(v.violated());
  check_verdict_invariants(phi, v);
  const auto [tuple, value] = tuple_from_block_witness(phi, std::get<BlockOperator>(*v.witness));
  CHECK(tuple.size() == 2);
  CHECK(value <= -v.violation_tol / 2);
  CHECK(std::abs(min_eigenvalue(kks_block_defect(phi, tuple)) - value) < 1e-12);

  // And back: stacking the tuple as a block row is a block witness.
  const BlockOperator row = BlockOperator::from_row(tuple);
  CHECK(evaluate_ks(phi, 2, row) <= -v.violation_tol / 2);
}

TEST_CASE("KS is convex and unitarily stable") {
  const QuantumMap a = sample_utp_cp(3, 21, 2);
  const QuantumMap b = reduction(3, 0.5);
  REQUIRE_FALSE(falsify_ks(a, 1, budget(14)).violated());
  REQUIRE_FALSE(falsify_ks(b, 1, budget(15)).violated());
  Rng rng(16);
  for (int s = 0; s < 5; ++s) {
    const double t = rng.uniform();
    CHECK_FALSE(falsify_ks(t * a + (1 - t) * b, 1, budget(20 + s, 4)).violated());
  }
  const QuantumMap sw = unitary_sandwich(b, haar_unitary(3, rng), haar_unitary(3, rng));
  CHECK_FALSE(falsify_ks(sw, 1, budget(17)).violated());
}

TEST_CASE("delta lemma") {
  for (int k : {1, 2, 3}) {
    const DeltaLemmaReport r = check_delta_lemma(k, 2, 50, 18);
    CHECK(r.projector_residual < 1e-12);
    CHECK(r.multiplicative_residual < 1e-10);
    CHECK(r.annihilation_residual < 1e-10);
    CHECK(r.kernel_residual < 1e-10);
  }
}

TEST_CASE("(k+1)-positive UTP maps are k-KS") {
  SearchBudget b = budget(0, 4);
  const KpImpliesKksReport r1 = check_kp_implies_kks(3, 1, 19, b, 6);
  CHECK(r1.passed());
  CHECK(r1.samples.size() == 6);
  const KpImpliesKksReport r2 = check_kp_implies_kks(3, 2, 20, b, 4);
  CHECK(r2.passed());

  // A unitary conjugation is a *-homomorphism: zero defect.
  const QuantumMap u = sample_utp_cp(3, 22, 1);
  CHECK(std::abs(falsify_ks(u, 2, b).worst_value) < 1e-10);
}

TEST_CASE("verdicts are deterministic given the seed") {
  const QuantumMap phi = reduction(3, 0.9);
  const auto v1 = falsify_ks(phi, 1, budget(23));
  const auto v2 = falsify_ks(phi, 1, budget(23));
  CHECK(v1.worst_value == v2.worst_value);
  CHECK(std::get<BlockOperator>(*v1.witness).data() == std::get<BlockOperator>(*v2.witness).data());
  CHECK(v1.budget_used.iterations == v2.budget_used.iterations);
}
