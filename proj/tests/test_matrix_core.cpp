#include "doctest.h"
#include "kslab/block_operator.hpp"
#include "kslab/errors.hpp"
#include "kslab/matrix_core.hpp"
#include "kslab/random.hpp"

using namespace kslab;

namespace {

const Complex I1(0.0, 1.0);

ComplexMatrix diag(std::initializer_list<Complex> v) {
  ComplexVector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) d(i++) = x;
  return d.asDiagonal();
}

ComplexMatrix swap_matrix(int d) {
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s(i * d + j, j * d + i) = 1.0;
  return s;
}

}  // namespace

TEST_CASE("adjoint") {
  ComplexMatrix a(2, 2);
  a << 0, 1, 0, 0;
  ComplexMatrix expect(2, 2);
  expect << 0, 0, 1, 0;
  CHECK(adjoint(a) == expect);

  const ComplexMatrix b = diag({I1, -I1});
  CHECK(adjoint(b) == diag({-I1, I1}));

  Rng rng(1);
  const ComplexMatrix h = random_hermitian(4, rng);
  CHECK((adjoint(h) - h).norm() < 1e-15);
  const ComplexMatrix g = ginibre(3, 5, rng);
  CHECK(adjoint(adjoint(g)) == g);
}

TEST_CASE("kron") {
  CHECK(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)) == ComplexMatrix::Identity(4, 4));

  Rng rng(2);
  const ComplexMatrix b = ginibre(2, 2, rng);
  const ComplexMatrix e = kron(matrix_unit(2, 0, 0), b);
  CHECK(e.block(0, 0, 2, 2) == b);
  CHECK(e.block(0, 2, 2, 2).norm() == 0.0);
  CHECK(e.block(2, 0, 2, 2).norm() == 0.0);
  CHECK(e.block(2, 2, 2, 2).norm() == 0.0);

  CHECK(kron(diag({1, 2}), diag({3, 4})) == diag({3, 4, 6, 8}));
}

TEST_CASE("vec stacks columns") {
  ComplexMatrix a(2, 2);
  a << 1, 2, 3, 4;
  const ComplexVector v = vec(a);
  CHECK(v(0) == Complex(1));
  CHECK(v(1) == Complex(3));
  CHECK(v(2) == Complex(2));
  CHECK(unvec(v, 2) == a);
}

TEST_CASE("partial_trace_second") {
  Rng rng(3);
  const ComplexMatrix m = ginibre(2, 2, rng);
  const ComplexMatrix y = ginibre(3, 3, rng);
  const BlockOperator x(2, 3, kron(m, y));
  CHECK((partial_trace_second(x) - m * y.trace()).norm() < 1e-13);

  const BlockOperator id(3, 2, ComplexMatrix::Identity(6, 6));
  CHECK((partial_trace_second(id) - 2.0 * ComplexMatrix::Identity(3, 3)).norm() == 0.0);

  for (int s = 0; s < 20; ++s) {
    const ComplexMatrix z = ginibre(6, 6, rng);
    CHECK(std::abs(partial_trace_second(z, 2, 3).trace() - z.trace()) < 1e-12);
    const ComplexMatrix w = ginibre(6, 6, rng);
    const Complex al(0.3, -1.2), be(-2.0, 0.5);
    const ComplexMatrix lhs = partial_trace_second(al * z + be * w, 2, 3);
    const ComplexMatrix rhs = al * partial_trace_second(z, 2, 3) + be * partial_trace_second(w, 2, 3);
    CHECK((lhs - rhs).norm() < 1e-12);
  }

  CHECK_THROWS_AS(partial_trace_second(ComplexMatrix::Identity(5, 5), 2, 3), DimensionError);
  CHECK_THROWS_AS(BlockOperator(2, 3, ComplexMatrix::Identity(5, 5)), DimensionError);
}

TEST_CASE("min_eigenvalue") {
  CHECK(min_eigenvalue(diag({3, -1, 0})) == doctest::Approx(-1.0).epsilon(1e-14));

  Rng rng(4);
  for (int s = 0; s < 50; ++s) {
    const ComplexMatrix x = ginibre(4, 4, rng);
    CHECK(min_eigenvalue(x.adjoint() * x) >= -1e-12);
  }

  const ComplexMatrix gap = ComplexMatrix::Identity(4, 4) - swap_matrix(2);
  CHECK(std::abs(min_eigenvalue(gap)) < 1e-14);

  ComplexMatrix bad(2, 2);
  bad << 0, 1, 0, 0;
  CHECK_THROWS_AS(min_eigenvalue(bad), NonHermitianError);
  try {
    min_eigenvalue(bad);
  } catch (const NonHermitianError& e) {
    CHECK(e.residual() > 0.5);
  }
}

TEST_CASE("is_psd") {
  CHECK(is_psd(ComplexMatrix::Zero(3, 3), 1e-9));
  CHECK_FALSE(is_psd(diag({1, -1e-6}), 1e-9));
  CHECK(is_psd(diag({1, -1e-12}), 1e-9));
}

TEST_CASE("hs_inner is conjugate-symmetric and positive-definite") {
  Rng rng(5);
  for (int s = 0; s < 50; ++s) {
    const ComplexMatrix a = ginibre(3, 3, rng);
    const ComplexMatrix b = ginibre(3, 3, rng);
    CHECK(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))) < 1e-12);
    const Complex aa = hs_inner(a, a);
    CHECK(aa.real() > 0.0);
    CHECK(std::abs(aa.imag()) < 1e-12);
  }
  CHECK(std::abs(hs_inner(ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2))) < 1e-12);
}

TEST_CASE("spectral decomposition reconstructs Hermitian input") {
  Rng rng(6);
  for (int s = 0; s < 1000; ++s) {
    const Eigen::Index n = 1 + s % 12;
    const ComplexMatrix a = random_hermitian(n, rng);
    const SpectralDecomposition sd = spectral_decompose(a);
    for (Eigen::Index i = 1; i < n; ++i) REQUIRE(sd.eigenvalues(i - 1) <= sd.eigenvalues(i));
    const ComplexMatrix u = sd.eigenvectors;
    const ComplexMatrix rec = u * sd.eigenvalues.cast<Complex>().asDiagonal() * u.adjoint();
    REQUIRE((a - rec).norm() <= 1e-10 * std::max(a.norm(), 1e-300));
    REQUIRE((u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm() < 1e-10);
  }
}

TEST_CASE("jordan product is unnormalized") {
  Rng rng(7);
  const ComplexMatrix a = ginibre(3, 3, rng);
  const ComplexMatrix b = ginibre(3, 3, rng);
  CHECK((jordan(a, b) - (a * b + b * a)).norm() < 1e-14);
  CHECK((jordan(a, a) - 2.0 * a * a).norm() < 1e-13);
}

TEST_CASE("orthonormalize_columns") {
  Rng rng(8);
  const ComplexMatrix q = orthonormalize_columns(ginibre(5, 3, rng));
  CHECK((q.adjoint() * q - ComplexMatrix::Identity(3, 3)).norm() < 1e-13);
}

TEST_CASE("all_finite") {
  ComplexMatrix a = ComplexMatrix::Identity(2, 2);
  CHECK(all_finite(a));
  a(0, 1) = Complex(std::nan(""), 0.0);
  CHECK_FALSE(all_finite(a));
}
