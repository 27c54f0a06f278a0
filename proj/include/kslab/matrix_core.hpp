#pragma once

// Dense complex linear algebra shared by every other module.
//
// Conventions:
//  * vec() stacks columns (column 1 first). Eigen stores column-major, so a
//    vectorized matrix is simply a reinterpretation of its storage.
//  * A kd x kd block operator uses global index = block * d + intra-block
//    index, i.e. the k-factor is the left factor of a Kronecker product.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace kslab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

struct SpectralDecomposition {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // unitary, eigenvectors as columns
};

ComplexMatrix adjoint(const ComplexMatrix& a);

// Block (i, j) of the result is a(i, j) * b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix matrix_unit(Eigen::Index n, Eigen::Index i, Eigen::Index j);

ComplexVector vec(const ComplexMatrix& x);
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows);

// Tr(a^* b).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);
double hs_norm(const ComplexMatrix& a);

// Jordan product in the unnormalized form a b + b a.
ComplexMatrix jordan(const ComplexMatrix& a, const ComplexMatrix& b);

// ||a - a^*||_HS.
double hermitian_residual(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double rel_tol = kHermitianTol);

// Throws NonHermitianError when ||a - a^*|| > rel_tol * max(1, ||a||).
void require_hermitian(const ComplexMatrix& a, const char* what,
                       double rel_tol = kHermitianTol);

// Spectral decomposition of the Hermitian part (a + a^*)/2.
SpectralDecomposition spectral_decompose(const ComplexMatrix& a);

// Smallest eigenvalue of (a + a^*)/2 after checking hermiticity.
double min_eigenvalue(const ComplexMatrix& a);

// min_eigenvalue(a) >= -tol.
bool is_psd(const ComplexMatrix& a, double tol = kPsdTol);

// Unchecked variant for inner loops where the argument is Hermitian by
// construction; only the lower triangle is read.
double hermitian_min_eigenvalue(const ComplexMatrix& a);

bool all_finite(const ComplexMatrix& a);

// Orthonormal columns spanning the column space of a (thin QR).
ComplexMatrix orthonormalize_columns(const ComplexMatrix& a);

}  // namespace kslab
