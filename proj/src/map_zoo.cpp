#include "kslab/map_zoo.hpp"

#include <cmath>
#include <sstream>

#include "kslab/errors.hpp"
#include "kslab/random.hpp"

namespace kslab {

namespace {

std::string with_param(const std::string& name, double a) {
  std::ostringstream os;
  os.precision(17);
  os << name << "(a=" << a << ")";
  return os.str();
}

void require_utp_base(const QuantumMap& base, const char* who) {
  if (!base.is_unital() || !base.is_trace_preserving()) {
    std::ostringstream os;
    os << who << ": base map '" << base.label() << "' must be unital and trace-preserving"
       << " (unital=" << base.is_unital() << ", tp=" << base.is_trace_preserving() << ")";
    throw HypothesisError(os.str());
  }
}

void require_below_d(int d, double a, const char* who) {
  if (!(a < d)) {
    std::ostringstream os;
    os << who << ": parameter a=" << a << " must satisfy a < d=" << d;
    throw DomainError(os.str());
  }
}

QuantumMap require_utp_result(QuantumMap m, const char* who) {
  if (!m.is_utp()) {
    std::ostringstream os;
    os << who << ": constructed map is not unital and trace-preserving";
    throw ConstructionError(os.str());
  }
  return m;
}

void require_unitary(const ComplexMatrix& u, int d, const char* name) {
  if (u.rows() != d || u.cols() != d) throw DimensionError(std::string("unitary_sandwich: ") + name + " must be d x d");
  if ((u.adjoint() * u - ComplexMatrix::Identity(d, d)).norm() > 1e-10)
    throw HypothesisError(std::string("unitary_sandwich: ") + name + " is not unitary");
}

ComplexMatrix inverse_sqrt_psd(const ComplexMatrix& a) {
  const SpectralDecomposition sd = spectral_decompose(a);
  const RealVector s = sd.eigenvalues.array().rsqrt();
  return sd.eigenvectors * s.asDiagonal() * sd.eigenvectors.adjoint();
}

}  // namespace

QuantumMap identity_map(int d) {
  if (d < 1) throw DomainError("identity_map: d must be >= 1");
  return QuantumMap::from_transfer(d, ComplexMatrix::Identity(d * d, d * d), "identity");
}

QuantumMap transposition(int d) {
  if (d < 1) throw DomainError("transposition: d must be >= 1");
  ComplexMatrix t = ComplexMatrix::Zero(d * d, d * d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) t(j + i * d, i + j * d) = 1.0;
  return QuantumMap::from_transfer(d, std::move(t), "transpose");
}

QuantumMap depolarizing(int d) {
  if (d < 1) throw DomainError("depolarizing: d must be >= 1");
  const ComplexVector id = vec(ComplexMatrix::Identity(d, d));
  return QuantumMap::from_transfer(d, id * id.adjoint() / static_cast<double>(d), "delta");
}

QuantumMap reduction(int d, double a) {
  if (d < 1) throw DomainError("reduction: d must be >= 1");
  require_below_d(d, a, "reduction");
  const ComplexVector id = vec(ComplexMatrix::Identity(d, d));
  ComplexMatrix t = (id * id.adjoint() - a * ComplexMatrix::Identity(d * d, d * d)) / (d - a);
  return require_utp_result(QuantumMap::from_transfer(d, std::move(t), with_param("reduction", a)),
                            "reduction");
}

QuantumMap lambda_minus(const QuantumMap& base, double a) {
  const int d = base.d();
  require_utp_base(base, "lambda_minus");
  require_below_d(d, a, "lambda_minus");
  const ComplexMatrix t =
      (d * depolarizing(d).transfer() - a * base.transfer()) / (d - a);
  return require_utp_result(
      QuantumMap::from_transfer(d, t, with_param("lambda-minus[" + base.label() + "]", a)),
      "lambda_minus");
}

QuantumMap lambda_plus(const QuantumMap& base, double a) {
  const int d = base.d();
  require_utp_base(base, "lambda_plus");
  const ComplexMatrix t = a * depolarizing(d).transfer() + (1.0 - a) * base.transfer();
  return require_utp_result(
      QuantumMap::from_transfer(d, t, with_param("lambda-plus[" + base.label() + "]", a)),
      "lambda_plus");
}

QuantumMap unitary_sandwich(const QuantumMap& phi, const ComplexMatrix& u, const ComplexMatrix& v) {
  const int d = phi.d();
  require_unitary(u, d, "U");
  require_unitary(v, d, "V");
  const ComplexMatrix t = kron(u.conjugate(), u) * phi.transfer() * kron(v.conjugate(), v);
  return QuantumMap::from_transfer(d, t, "sandwich(" + phi.label() + ")");
}

QuantumMap sample_utp_cp(int d, std::uint64_t seed, int n_kraus) {
  if (d < 1) throw DomainError("sample_utp_cp: d must be >= 1");
  if (n_kraus < 1) throw DomainError("sample_utp_cp: n_kraus must be >= 1");
  Rng rng(seed);
  const ComplexMatrix iso = haar_isometry(static_cast<Eigen::Index>(n_kraus) * d, d, rng);
  std::vector<ComplexMatrix> ks;
  for (int m = 0; m < n_kraus; ++m) ks.push_back(iso.block(m * d, 0, d, d));

  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  auto unital_gram = [&] {
    ComplexMatrix r = ComplexMatrix::Zero(d, d);
    for (const auto& k : ks) r += k * k.adjoint();
    return r;
  };
  auto tp_gram = [&] {
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (const auto& k : ks) s += k.adjoint() * k;
    return s;
  };

  // Alternate between the unital constraint sum K K^* = I and the
  // trace-preserving constraint sum K^* K = I by congruence normalization.
  bool converged = false;
  for (int sweep = 0; sweep < kSamplerMaxSweeps; ++sweep) {
    const ComplexMatrix r = unital_gram();
    if ((r - id).norm() < 1e-12 && (tp_gram() - id).norm() < 1e-12) {
      converged = true;
      break;
    }
    const ComplexMatrix left = inverse_sqrt_psd(r);
    for (auto& k : ks) k = left * k;
    const ComplexMatrix right = inverse_sqrt_psd(tp_gram());
    for (auto& k : ks) k = k * right;
  }
  if (!converged) {
    const double ru = (unital_gram() - id).norm();
    const double rt = (tp_gram() - id).norm();
    if (ru >= 1e-10 || rt >= 1e-10) {
      std::ostringstream os;
      os << "sample_utp_cp: normalization did not converge (unital residual " << ru
         << ", tp residual " << rt << ")";
      throw ConstructionError(os.str());
    }
  }
  std::ostringstream label;
  label << "random-utp(seed=" << seed << ",n_kraus=" << n_kraus << ")";
  return require_utp_result(QuantumMap::from_kraus(ks, label.str()), "sample_utp_cp");
}

double bound_lambda_minus(int d, int k) {
  if (d < 1 || k < 1 || k > d) throw DomainError("bound_lambda_minus: need 1 <= k <= d");
  return static_cast<double>(d) / (static_cast<double>(k) * d + 1.0);
}

std::pair<double, double> bounds_lambda_plus(int d, int k) {
  if (d < 1 || k < 1) throw DomainError("bounds_lambda_plus: need k, d >= 1");
  const double kd = static_cast<double>(k) * d;
  const double root = std::sqrt(4.0 * kd + 1.0);
  return {1.0 - (root - 1.0) / (2.0 * kd), 1.0 + (root + 1.0) / (2.0 * kd)};
}

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Delta: return "delta";
    case Family::Reduction: return "reduction";
    case Family::LambdaMinus: return "lambda-minus";
    case Family::LambdaPlus: return "lambda-plus";
    case Family::Identity: return "identity";
    case Family::Transpose: return "transpose";
    case Family::RandomUtp: return "random-utp";
  }
  return "unknown";
}

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {"delta",    "reduction", "lambda-minus", "lambda-plus",
                                                 "identity", "transpose", "random-utp"};
  return names;
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : {Family::Delta, Family::Reduction, Family::LambdaMinus, Family::LambdaPlus,
                   Family::Identity, Family::Transpose, Family::RandomUtp})
    if (family_name(f) == name) return f;
  return std::nullopt;
}

QuantumMap build_family(const FamilyParams& p) {
  auto base = [&]() -> const QuantumMap& {
    if (!p.base) throw DomainError(std::string(family_name(p.family)) + ": a base map is required");
    if (p.base->d() != p.d) throw DimensionError("base map dimension does not match d");
    return *p.base;
  };
  switch (p.family) {
    case Family::Delta: return depolarizing(p.d);
    case Family::Reduction: return reduction(p.d, p.a);
    case Family::LambdaMinus: return lambda_minus(base(), p.a);
    case Family::LambdaPlus: return lambda_plus(base(), p.a);
    case Family::Identity: return identity_map(p.d);
    case Family::Transpose: return transposition(p.d);
    case Family::RandomUtp: return sample_utp_cp(p.d, p.seed, p.n_kraus);
  }
  throw DomainError("unknown family");
}

}  // namespace kslab
