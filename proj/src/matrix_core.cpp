#include "kslab/matrix_core.hpp"

#include <algorithm>
#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto br = b.rows();
  const auto bc = b.cols();
  ComplexMatrix out(a.rows() * br, a.cols() * bc);
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

ComplexMatrix matrix_unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

ComplexVector vec(const ComplexMatrix& x) {
  return Eigen::Map<const ComplexVector>(x.data(), x.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows) {
  if (rows <= 0 || v.size() % rows != 0)
    throw DimensionError("unvec: vector length is not a multiple of rows");
  return Eigen::Map<const ComplexMatrix>(v.data(), rows, v.size() / rows);
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("hs_inner: shape mismatch");
  return (a.array().conjugate() * b.array()).sum();
}

double hs_norm(const ComplexMatrix& a) { return a.norm(); }

ComplexMatrix jordan(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b + b * a;
}

double hermitian_residual(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("matrix is not square");
  return (a - a.adjoint()).norm();
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  return hermitian_residual(a) <= rel_tol * std::max(1.0, a.norm());
}

void require_hermitian(const ComplexMatrix& a, const char* what,
                       double rel_tol) {
  const double r = hermitian_residual(a);
  if (r > rel_tol * std::max(1.0, a.norm())) {
    std::ostringstream os;
    os << what << ": matrix is not Hermitian (||A - A*||_HS = " << r << ")";
    throw NonHermitianError(os.str(), r);
  }
}

SpectralDecomposition spectral_decompose(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("matrix is not square");
  const ComplexMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const ComplexMatrix& a) {
  require_hermitian(a, "min_eigenvalue");
  const ComplexMatrix h = 0.5 * (a + a.adjoint());
  return hermitian_min_eigenvalue(h);
}

bool is_psd(const ComplexMatrix& a, double tol) {
  return min_eigenvalue(a) >= -tol;
}

double hermitian_min_eigenvalue(const ComplexMatrix& a) {
  if (a.rows() == 1) return a(0, 0).real();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool all_finite(const ComplexMatrix& a) { return a.allFinite(); }

ComplexMatrix orthonormalize_columns(const ComplexMatrix& a) {
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(a.rows(), a.cols());
  // Fix the phase so the factorization is unique (R with positive diagonal).
  const ComplexMatrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const Complex rjj = r(j, j);
    if (std::abs(rjj) > 0) q.col(j) *= rjj / std::abs(rjj);
  }
  return q;
}

}  // namespace kslab
