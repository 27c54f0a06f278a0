#include "kslab/superop.hpp"

#include <cmath>
#include <sstream>

#include "kslab/errors.hpp"

namespace kslab {

namespace {

void require_same_dim(const QuantumMap& a, const QuantumMap& b, const char* op) {
  if (a.d() != b.d()) {
    std::ostringstream os;
    os << op << ": dimension mismatch (" << a.d() << " vs " << b.d() << ")";
    throw DimensionError(os.str());
  }
}

ComplexMatrix choi_from_transfer(int d, const ComplexMatrix& t) {
  ComplexMatrix c(d * d, d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      c.block(i * d, j * d, d, d) = unvec(t.col(i + j * d), d);
  return c;
}

}  // namespace

QuantumMap::QuantumMap(int d, ComplexMatrix transfer, std::string label)
    : d_(d), transfer_(std::move(transfer)), label_(std::move(label)) {
  if (d < 1) throw DimensionError("QuantumMap: d must be positive");
  const int n = d * d;
  if (transfer_.rows() != n || transfer_.cols() != n) {
    std::ostringstream os;
    os << "QuantumMap: transfer matrix must be " << n << "x" << n << ", got "
       << transfer_.rows() << "x" << transfer_.cols();
    throw DimensionError(os.str());
  }
  if (!transfer_.allFinite()) throw DomainError("QuantumMap: transfer matrix has non-finite entries");

  const ComplexVector id = vec(ComplexMatrix::Identity(d, d));
  unital_ = (transfer_ * id - id).norm() <= kStructureTol;
  trace_preserving_ = (transfer_.adjoint() * id - id).norm() <= kStructureTol;
  const ComplexMatrix c = choi_from_transfer(d, transfer_);
  hermiticity_preserving_ = hermitian_residual(c) <= kStructureTol * std::max(1.0, c.norm());
}

QuantumMap QuantumMap::from_transfer(int d, ComplexMatrix transfer, std::string label) {
  return QuantumMap(d, std::move(transfer), std::move(label));
}

QuantumMap QuantumMap::from_choi(int d, const ComplexMatrix& c, std::string label) {
  if (d < 1 || c.rows() != d * d || c.cols() != d * d)
    throw DimensionError("QuantumMap::from_choi: Choi matrix must be d^2 x d^2");
  ComplexMatrix t(d * d, d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) t.col(i + j * d) = vec(c.block(i * d, j * d, d, d));
  return QuantumMap(d, std::move(t), std::move(label));
}

QuantumMap QuantumMap::from_kraus(const std::vector<ComplexMatrix>& kraus, std::string label) {
  if (kraus.empty()) throw DimensionError("QuantumMap::from_kraus: no Kraus operators");
  const auto d = kraus.front().rows();
  ComplexMatrix t = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d)
      throw DimensionError("QuantumMap::from_kraus: Kraus operators must be d x d");
    // vec(K X K^*) = (conj(K) (x) K) vec(X)
    t += kron(k.conjugate(), k);
  }
  return QuantumMap(static_cast<int>(d), std::move(t), std::move(label));
}

ComplexMatrix QuantumMap::operator()(const ComplexMatrix& x) const {
  if (x.rows() != d_ || x.cols() != d_) {
    std::ostringstream os;
    os << "apply: expected " << d_ << "x" << d_ << " operand, got " << x.rows() << "x" << x.cols();
    throw DimensionError(os.str());
  }
  const ComplexVector y = transfer_ * vec(x);
  return unvec(y, d_);
}

QuantumMap QuantumMap::relabeled(std::string label) const {
  QuantumMap out = *this;
  out.label_ = std::move(label);
  return out;
}

ComplexMatrix apply(const QuantumMap& phi, const ComplexMatrix& x) { return phi(x); }

AmplifiedMap::AmplifiedMap(const QuantumMap& phi, int k) : phi_(phi), k_(k) {
  if (k < 1) throw DomainError("amplify: k must be >= 1");
}

ComplexMatrix AmplifiedMap::operator()(const ComplexMatrix& x) const {
  const int d = phi_.d();
  const int n = k_ * d;
  if (x.rows() != n || x.cols() != n) {
    std::ostringstream os;
    os << "amplified apply: expected " << n << "x" << n << " operand, got " << x.rows() << "x"
       << x.cols();
    throw DimensionError(os.str());
  }
  // Gather every block as a column, apply T once, scatter back.
  ComplexMatrix cols(d * d, k_ * k_);
  for (int j = 0; j < k_; ++j)
    for (int i = 0; i < k_; ++i) {
      Eigen::Map<ComplexMatrix>(cols.col(i + j * k_).data(), d, d) = x.block(i * d, j * d, d, d);
    }
  const ComplexMatrix mapped = phi_.transfer() * cols;
  ComplexMatrix out(n, n);
  for (int j = 0; j < k_; ++j)
    for (int i = 0; i < k_; ++i)
      out.block(i * d, j * d, d, d) = Eigen::Map<const ComplexMatrix>(mapped.col(i + j * k_).data(), d, d);
  return out;
}

BlockOperator AmplifiedMap::operator()(const BlockOperator& x) const {
  if (x.k() != k_ || x.d() != phi_.d()) throw DimensionError("amplified apply: block metadata mismatch");
  return BlockOperator(k_, phi_.d(), (*this)(x.data()));
}

AmplifiedMap amplify(const QuantumMap& phi, int k) { return AmplifiedMap(phi, k); }

ComplexMatrix amplified_transfer(const QuantumMap& phi, int k) {
  const AmplifiedMap amp(phi, k);
  const int n = k * phi.d();
  ComplexMatrix t(n * n, n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) t.col(i + j * n) = vec(amp(matrix_unit(n, i, j)));
  return t;
}

ComplexMatrix choi(const QuantumMap& phi) { return choi_from_transfer(phi.d(), phi.transfer()); }

bool is_completely_positive(const QuantumMap& phi, double tol) {
  if (!phi.is_hermiticity_preserving()) return false;
  return is_psd(choi(phi), tol);
}

std::vector<ComplexMatrix> kraus_operators(const QuantumMap& phi, double tol) {
  if (!is_completely_positive(phi, tol))
    throw HypothesisError("kraus_operators: map is not completely positive");
  const int d = phi.d();
  const SpectralDecomposition sd = spectral_decompose(choi(phi));
  std::vector<ComplexMatrix> out;
  for (Eigen::Index m = sd.eigenvalues.size() - 1; m >= 0; --m) {
    const double mu = sd.eigenvalues(m);
    if (mu <= tol) break;
    // Eigenvector component i*d + a is K(a, i) / sqrt(mu).
    ComplexMatrix k(d, d);
    for (int i = 0; i < d; ++i)
      for (int a = 0; a < d; ++a) k(a, i) = std::sqrt(mu) * sd.eigenvectors(i * d + a, m);
    out.push_back(std::move(k));
  }
  return out;
}

QuantumMap hs_dual(const QuantumMap& phi) {
  return QuantumMap::from_transfer(phi.d(), phi.transfer().adjoint(), "dual(" + phi.label() + ")");
}

double hs_norm(const QuantumMap& phi) {
  Eigen::JacobiSVD<ComplexMatrix> svd(phi.transfer());
  return svd.singularValues()(0);
}

bool is_hs_contraction(const QuantumMap& phi, double tol) { return hs_norm(phi) <= 1.0 + tol; }

QuantumMap compose(const QuantumMap& outer, const QuantumMap& inner) {
  require_same_dim(outer, inner, "compose");
  return QuantumMap::from_transfer(outer.d(), outer.transfer() * inner.transfer(),
                                   outer.label() + " o " + inner.label());
}

QuantumMap operator+(const QuantumMap& a, const QuantumMap& b) {
  require_same_dim(a, b, "operator+");
  return QuantumMap::from_transfer(a.d(), a.transfer() + b.transfer(), a.label() + " + " + b.label());
}

QuantumMap operator-(const QuantumMap& a, const QuantumMap& b) {
  require_same_dim(a, b, "operator-");
  return QuantumMap::from_transfer(a.d(), a.transfer() - b.transfer(), a.label() + " - " + b.label());
}

QuantumMap operator*(double s, const QuantumMap& a) {
  std::ostringstream os;
  os << s << "*" << a.label();
  return QuantumMap::from_transfer(a.d(), s * a.transfer(), os.str());
}

QuantumMap rescale_hs_norm(const QuantumMap& phi, double target) {
  const double n = hs_norm(phi);
  if (n <= 0) throw DomainError("rescale_hs_norm: zero map");
  return (target / n) * phi;
}

double transfer_distance(const QuantumMap& a, const QuantumMap& b) {
  require_same_dim(a, b, "transfer_distance");
  return (a.transfer() - b.transfer()).norm();
}

}  // namespace kslab
