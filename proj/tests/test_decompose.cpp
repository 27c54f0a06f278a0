#include <cmath>

#include "doctest.h"
#include "kslab/decompose.hpp"
#include "kslab/errors.hpp"
#include "kslab/map_zoo.hpp"
#include "kslab/random.hpp"

using namespace kslab;

namespace {

SearchBudget budget(std::uint64_t seed) {
  SearchBudget b;
  b.restarts = 8;
  b.seed = seed;
  return b;
}

const DecompositionCheck& check_named(const DecompositionReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  return r.checks.front();
}

}  // namespace

TEST_CASE("lambda-plus-T threshold") {
  CHECK(lambda_plus_T_threshold(2) == doctest::Approx(0.5));
  CHECK(lambda_plus_T_threshold(3) == doctest::Approx((7.0 - std::sqrt(13.0)) / 6.0));
  // Matches the lower Lambda+ bound at k = 1.
  for (int d = 1; d <= 5; ++d) CHECK(lambda_plus_T_threshold(d) == doctest::Approx(bounds_lambda_plus(d, 1).first));
}

TEST_CASE("decompose_lambda_plus_T") {
  const auto r = decompose_lambda_plus_T(2, 0.2);
  const auto& p = std::get<LambdaPlusParams>(r.params);
  CHECK(r.lambda == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(p.beta == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(p.lambda * p.beta - 0.2) < 1e-14);
  CHECK(r.residual < 1e-12);
  CHECK(transfer_distance(r.phi2, transposition(2)) == 0.0);

  const auto triv = decompose_lambda_plus_T(3, 0.9);
  CHECK(triv.lambda == 1.0);
  CHECK(transfer_distance(triv.phi1, lambda_plus(transposition(3), 0.9)) < 1e-14);

  const auto zero = decompose_lambda_plus_T(2, 0.0);
  CHECK(zero.lambda == 0.0);
  CHECK(transfer_distance(decomposition_target(zero), transposition(2)) < 1e-15);

  CHECK_THROWS_AS(decompose_lambda_plus_T(2, 1.5), DomainError);
  CHECK_THROWS_AS(decompose_lambda_plus_T(2, -0.1), DomainError);
}

TEST_CASE("decompose_reduction worked example") {
  const auto r = decompose_reduction(2, 0.9);
  const auto& p = std::get<ReductionParams>(r.params);
  CHECK(p.alpha == doctest::Approx(1.0 / 11).epsilon(1e-14));
  CHECK(r.lambda == doctest::Approx(5.0 / 33).epsilon(1e-14));
  CHECK(p.beta == doctest::Approx(1.0 / 33).epsilon(1e-14));
  CHECK(p.gamma == doctest::Approx(9.0 / 11).epsilon(1e-14));
  CHECK(p.delta == doctest::Approx(-26.0 / 33).epsilon(1e-14));
  CHECK(p.beta / p.alpha == doctest::Approx(1.0 / 3));
  CHECK(-p.delta / p.gamma == doctest::Approx(26.0 / 27));
  CHECK(parameter_identity_residual(r) <= 1e-14);
  CHECK(r.residual < 1e-12);
  CHECK(r.phi1.is_unital());
  CHECK(r.phi2.is_unital());

  const auto report = verify_decomposition(r, reduction(2, 0.9), budget(1));
  CHECK(report.passed());
  CHECK(report.checks.size() == 4);
}

TEST_CASE("decompose_reduction trivial and boundary cases") {
  const auto r = decompose_reduction(2, 0.5);
  CHECK(r.lambda == 1.0);
  CHECK(transfer_distance(r.phi1, reduction(2, 0.5)) < 1e-15);
  CHECK(parameter_identity_residual(r) <= 1e-14);

  // The a = 1 branch has an empty feasible interval.
  const auto f = reduction_feasibility(2, 1.0);
  CHECK_FALSE(f.feasible);
  CHECK(f.width() < 0.0);
  CHECK_THROWS_AS(decompose_reduction(2, 1.0), ConstructionError);
  try {
    decompose_reduction(3, 1.0);
  } catch (const ConstructionError& e) {
    CHECK(std::string(e.what()).find("alpha d^2/(d+1)") != std::string::npos);
  }
  CHECK(reduction_feasibility(2, 0.9).feasible);

  CHECK_THROWS_AS(decompose_reduction(2, 1.2), DomainError);
  CHECK_THROWS_AS(decompose_reduction(1, 0.5), DimensionError);
}

TEST_CASE("reduction decompositions on a grid") {
  for (int d : {2, 3, 4}) {
    const double lo = d / (d + 1.0);
    for (int i = 1; i < 10; ++i) {
      const double a = lo + (1.0 - lo) * i / 10.0;
      const auto r = decompose_reduction(d, a);
      const auto& p = std::get<ReductionParams>(r.params);
      CHECK(parameter_identity_residual(r) <= 1e-14);
      CHECK(r.residual <= 1e-12);
      CHECK(p.delta < 0.0);
      CHECK(p.alpha * d * d / (d + 1.0) <= p.alpha * d);
      CHECK(r.lambda > 0.0);
      CHECK(r.lambda < 1.0);
      CHECK(r.phi1.is_unital());
      CHECK(r.phi2.is_unital());
    }
  }
}

TEST_CASE("verify_decomposition") {
  const auto lp = decompose_lambda_plus_T(2, 0.2);
  const auto rep = verify_decomposition(lp, decomposition_target(lp), budget(2));
  CHECK(rep.passed());
  CHECK(check_named(rep, "phi1-ks").passed);
  CHECK(check_named(rep, "phi2-co-ks").passed);
  CHECK(check_named(rep, "jordan-psd").value >= -1e-9);

  auto tampered = decompose_reduction(2, 0.9);
  tampered.lambda += 0.05;
  const auto bad = verify_decomposition(tampered, reduction(2, 0.9), budget(3));
  CHECK_FALSE(bad.passed());
  CHECK_FALSE(check_named(bad, "reconstruction").passed);

  // Swapping the parts breaks the KS claim on phi1: the co-KS part is not KS.
  auto swapped = decompose_lambda_plus_T(2, 0.2);
  std::swap(swapped.phi1, swapped.phi2);
  swapped.lambda = 1.0 - swapped.lambda;
  const auto sw = verify_decomposition(swapped, decomposition_target(swapped), budget(4));
  CHECK_FALSE(check_named(sw, "phi1-ks").passed);
}

TEST_CASE("jordan_defect") {
  Rng rng(5);
  const QuantumMap a = sample_utp_cp(3, 1, 2);
  const QuantumMap b = transposition(3);
  for (int s = 0; s < 10; ++s) {
    const ComplexMatrix x = ginibre(3, 3, rng);
    const ComplexMatrix xx = jordan(x.adjoint(), x);
    for (double lam : {0.0, 1.0}) {
      const QuantumMap phi = lam == 1.0 ? a : b;
      const ComplexMatrix y = phi(x);
      CHECK((jordan_defect(a, b, lam, x) - (phi(xx) - jordan(y.adjoint(), y))).norm() < 1e-12);
    }
    const ComplexMatrix y = a(x);
    CHECK((jordan_defect(a, a, 0.3, x) - (a(xx) - jordan(y.adjoint(), y))).norm() < 1e-12);
  }
  for (const auto& r : {decompose_reduction(2, 0.9), decompose_reduction(3, 0.95), decompose_lambda_plus_T(3, 0.3)})
    for (int s = 0; s < 20; ++s)
      CHECK(min_eigenvalue(jordan_defect(r.phi1, r.phi2, r.lambda, ginibre_unit(r.d, r.d, rng))) >= -1e-9);

  CHECK_THROWS_AS(jordan_defect(a, identity_map(2), 0.5, ginibre(3, 3, rng)), DimensionError);
  CHECK_THROWS_AS(jordan_defect(a, b, 1.5, ginibre(3, 3, rng)), DomainError);
}

TEST_CASE("stormer_defect") {
  Rng rng(6);
  for (int s = 0; s < 20; ++s) {
    const ComplexMatrix x = ginibre(3, 3, rng);
    CHECK(min_eigenvalue(stormer_defect(depolarizing(3), x)) >= -1e-10);
    CHECK(stormer_defect(identity_map(3), x).norm() < 1e-12);
    for (double a : {0.0, 0.5, 1.0}) CHECK(min_eigenvalue(stormer_defect(reduction(3, a), x)) >= -1e-10);
  }
  CHECK_THROWS_AS(stormer_defect(2.0 * identity_map(2), ComplexMatrix::Identity(2, 2)), DomainError);
}
