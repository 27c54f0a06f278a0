#include "kslab/certify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kslab/errors.hpp"
#include "kslab/map_zoo.hpp"

namespace kslab {

namespace {

void require_square(const QuantumMap& phi, const ComplexMatrix& x, const char* who) {
  if (x.rows() != phi.d() || x.cols() != phi.d()) {
    std::ostringstream os;
    os << who << ": operand must be " << phi.d() << "x" << phi.d();
    throw DimensionError(os.str());
  }
}

void require_block(const QuantumMap& phi, int k, const BlockOperator& x, const char* who) {
  if (x.k() != k || x.d() != phi.d()) {
    std::ostringstream os;
    os << who << ": block operator has (k, d) = (" << x.k() << ", " << x.d() << "), expected ("
       << k << ", " << phi.d() << ")";
    throw DimensionError(os.str());
  }
}

std::vector<std::string> ks_warnings(const QuantumMap& phi) {
  std::vector<std::string> w;
  if (!phi.is_unital()) w.push_back("map is not unital; the Kadison-Schwarz inequality is stated for unital maps");
  return w;
}

void require_hermiticity_preserving(const QuantumMap& phi, const char* who) {
  if (!phi.is_hermiticity_preserving())
    throw HypothesisError(std::string(who) + ": map must be hermiticity-preserving");
}

CertificateVerdict make_verdict(std::string property, int k, double worst, std::optional<Witness> witness,
                                const BudgetUsage& usage, const SearchBudget& budget) {
  CertificateVerdict v;
  v.property = std::move(property);
  v.k = k;
  v.worst_value = worst;
  v.verdict = worst < -budget.violation_tol ? Verdict::Violated : Verdict::NoViolationFound;
  if (v.violated()) v.witness = std::move(witness);
  v.budget_used = usage;
  v.seed = budget.seed;
  v.violation_tol = budget.violation_tol;
  return v;
}

// Isometric embedding of the free Schmidt factor into C^d (x) C^d.
// left_free: psi[a d + b] = sum_i F(a, i) W(b, i); otherwise F sits on the
// second factor: psi[a d + b] = sum_i W(a, i) F(b, i). F is vectorized
// column-major, index a + i d.
ComplexMatrix schmidt_embedding(const ComplexMatrix& w, bool left_free) {
  const auto d = w.rows();
  const auto k = w.cols();
  ComplexMatrix e = ComplexMatrix::Zero(d * d, d * k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) {
        if (left_free)
          e(a * d + b, a + i * d) = w(b, i);
        else
          e(a * d + b, b + i * d) = w(a, i);
      }
  return e;
}

struct SchmidtOutcome {
  double value = std::numeric_limits<double>::infinity();
  SchmidtWitness witness;
  long iterations = 0;
};

SchmidtOutcome schmidt_search(const ComplexMatrix& c, int d, int k, int max_iters, Rng rng) {
  SchmidtOutcome out;
  ComplexMatrix u = ginibre(d, k, rng);
  ComplexMatrix v = orthonormalize_columns(ginibre(d, k, rng));
  double prev = std::numeric_limits<double>::infinity();
  int stalls = 0;
  for (int it = 0; it < max_iters; ++it) {
    ++out.iterations;
    // u-step with v orthonormal: psi depends isometrically on u.
    {
      const ComplexMatrix e = schmidt_embedding(v, true);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(e.adjoint() * c * e);
      u = unvec(es.eigenvectors().col(0), d);
    }
    // Move the triangular factor of u onto v so the v-step is isometric too.
    {
      Eigen::HouseholderQR<ComplexMatrix> qr(u);
      const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, k);
      const ComplexMatrix r = q.adjoint() * u;
      v = v * r.transpose();
      u = q;
    }
    double value;
    {
      const ComplexMatrix e = schmidt_embedding(u, false);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(e.adjoint() * c * e);
      v = unvec(es.eigenvectors().col(0), d);
      value = es.eigenvalues()(0);
    }
    {
      Eigen::HouseholderQR<ComplexMatrix> qr(v);
      const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, k);
      const ComplexMatrix r = q.adjoint() * v;
      u = u * r.transpose();
      v = q;
    }
    if (prev - value < 1e-14) {
      if (++stalls >= 2) {
        prev = std::min(prev, value);
        break;
      }
    } else {
      stalls = 0;
    }
    prev = std::min(prev, value);
  }
  out.witness = SchmidtWitness{u, v};
  out.value = prev;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

// Objectives. For the bottom eigenvector v of the defect D and P = v v^*,
// Y = Phi_k(X) and A^dagger the HS dual of Phi_k, the gradient of v^* D v is
//   KS:    G = 2 (X A^dagger(P) - A^dagger(Y P))
//   co-KS: G = 2 (X A^dagger(P) - A^dagger(P Y))
//   Phi-k: G = 2 (X (P (x) I) - A^dagger(Y (P (x) I)))   (v in C^k)
// and v^* D v = vec(X)^* H_v vec(X) with T_k the transfer matrix of Phi_k:
//   KS:    H_v = A^dagger(P)^T (x) I - M^* M,  M = (v^T (x) I) T_k
//   co-KS: H_v = A^dagger(P)^T (x) I - M^* M,  M = (I (x) v^*) T_k
//   Phi-k: H_v = (P (x) I)^T (x) I - T_k^* ((P (x) I)^T (x) I) T_k

MinEigenObjective ks_objective(const QuantumMap& phi, int k) {
  const AmplifiedMap amp(phi, k);
  const AmplifiedMap dual(hs_dual(phi), k);
  const ComplexMatrix tk = amplified_transfer(phi, k);
  const Eigen::Index n = static_cast<Eigen::Index>(k) * phi.d();
  MinEigenObjective f;
  f.defect = [amp](const ComplexMatrix& x) {
    const ComplexMatrix y = amp(x);
    return ComplexMatrix(amp(x.adjoint() * x) - y.adjoint() * y);
  };
  f.gradient = [amp, dual](const ComplexMatrix& x, const ComplexVector& v) {
    const ComplexMatrix p = v * v.adjoint();
    return ComplexMatrix(2.0 * (x * dual(p) - dual(amp(x) * p)));
  };
  f.quadratic_form = [dual, tk, n](const ComplexVector& v) {
    const ComplexMatrix q = dual(v * v.adjoint());
    ComplexMatrix m = ComplexMatrix::Zero(n, n * n);
    for (Eigen::Index j = 0; j < n; ++j) m += v(j) * tk.middleRows(j * n, n);
    return ComplexMatrix(kron(q.transpose(), ComplexMatrix::Identity(n, n)) - m.adjoint() * m);
  };
  return f;
}

MinEigenObjective co_ks_objective(const QuantumMap& phi) {
  const AmplifiedMap amp(phi, 1);
  const AmplifiedMap dual(hs_dual(phi), 1);
  const ComplexMatrix tk = phi.transfer();
  const Eigen::Index n = phi.d();
  MinEigenObjective f;
  f.defect = [amp](const ComplexMatrix& x) {
    const ComplexMatrix y = amp(x);
    return ComplexMatrix(amp(x.adjoint() * x) - y * y.adjoint());
  };
  f.gradient = [amp, dual](const ComplexMatrix& x, const ComplexVector& v) {
    const ComplexMatrix p = v * v.adjoint();
    return ComplexMatrix(2.0 * (x * dual(p) - dual(p * amp(x))));
  };
  f.quadratic_form = [dual, tk, n](const ComplexVector& v) {
    const ComplexMatrix q = dual(v * v.adjoint());
    ComplexMatrix m = ComplexMatrix::Zero(n, n * n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) m.row(j) += std::conj(v(i)) * tk.row(i + j * n);
    return ComplexMatrix(kron(q.transpose(), ComplexMatrix::Identity(n, n)) - m.adjoint() * m);
  };
  return f;
}

MinEigenObjective phi_k_objective(const QuantumMap& phi, int k) {
  const AmplifiedMap amp(phi, k);
  const AmplifiedMap dual(hs_dual(phi), k);
  const ComplexMatrix tk = amplified_transfer(phi, k);
  const int d = phi.d();
  const Eigen::Index n = static_cast<Eigen::Index>(k) * d;
  MinEigenObjective f;
  f.defect = [amp, k, d](const ComplexMatrix& x) {
    const ComplexMatrix y = amp(x);
    return partial_trace_second(x.adjoint() * x - y.adjoint() * y, k, d);
  };
  f.gradient = [amp, dual, d](const ComplexMatrix& x, const ComplexVector& v) {
    const ComplexMatrix p = kron(v * v.adjoint(), ComplexMatrix::Identity(d, d));
    return ComplexMatrix(2.0 * (x * p - dual(amp(x) * p)));
  };
  f.quadratic_form = [tk, d, n](const ComplexVector& v) {
    const ComplexMatrix p = kron(v * v.adjoint(), ComplexMatrix::Identity(d, d));
    const ComplexMatrix w = kron(p.transpose(), ComplexMatrix::Identity(n, n));
    return ComplexMatrix(w - tk.adjoint() * w * tk);
  };
  return f;
}


ComplexMatrix ks_defect(const QuantumMap& phi, const ComplexMatrix& x) {
  require_square(phi, x, "ks_defect");
  const ComplexMatrix y = phi(x);
  return phi(x.adjoint() * x) - y.adjoint() * y;
}

ComplexMatrix co_ks_defect(const QuantumMap& phi, const ComplexMatrix& x) {
  require_square(phi, x, "co_ks_defect");
  const ComplexMatrix y = phi(x);
  return phi(x.adjoint() * x) - y * y.adjoint();
}

ComplexMatrix kks_block_defect(const QuantumMap& phi, const std::vector<ComplexMatrix>& tuple) {
  if (tuple.empty()) throw DimensionError("kks_block_defect: empty tuple");
  const int d = phi.d();
  const int k = static_cast<int>(tuple.size());
  std::vector<ComplexMatrix> images;
  images.reserve(k);
  for (const auto& x : tuple) {
    require_square(phi, x, "kks_block_defect");
    images.push_back(phi(x));
  }
  ComplexMatrix out(k * d, k * d);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i)
      out.block(i * d, j * d, d, d) =
          phi(tuple[i].adjoint() * tuple[j]) - images[i].adjoint() * images[j];
  return out;
}

ComplexMatrix amplified_ks_defect(const QuantumMap& phi, int k, const BlockOperator& x) {
  require_block(phi, k, x, "amplified_ks_defect");
  const AmplifiedMap amp(phi, k);
  const ComplexMatrix y = amp(x.data());
  return amp(x.data().adjoint() * x.data()) - y.adjoint() * y;
}

ComplexMatrix phi_k_defect(const QuantumMap& phi, int k, const BlockOperator& x) {
  require_block(phi, k, x, "phi_k_defect");
  const AmplifiedMap amp(phi, k);
  const ComplexMatrix y = amp(x.data());
  return partial_trace_second(x.data().adjoint() * x.data() - y.adjoint() * y, k, phi.d());
}

std::pair<ComplexMatrix, ComplexMatrix> strong_kadison_defects(const QuantumMap& phi, const ComplexMatrix& x,
                                                               const ComplexMatrix& y) {
  require_square(phi, x, "strong_kadison_defects");
  require_square(phi, y, "strong_kadison_defects");
  if (!is_psd(y - x.adjoint() * x))
    throw DomainError("strong_kadison_defects: precondition Y >= X^*X fails");
  if (!is_psd(y - x * x.adjoint()))
    throw DomainError("strong_kadison_defects: precondition Y >= XX^* fails");
  const ComplexMatrix px = phi(x);
  const ComplexMatrix py = phi(y);
  return {py - px.adjoint() * px, py - px * px.adjoint()};
}

std::string_view verdict_name(Verdict v) {
  return v == Verdict::Violated ? "violated" : "no-violation-found";
}

ComplexVector SchmidtWitness::state() const {
  const auto d = u.rows();
  ComplexVector psi = ComplexVector::Zero(d * d);
  for (Eigen::Index i = 0; i < u.cols(); ++i)
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) psi(a * d + b) += u(a, i) * v(b, i);
  const double n = psi.norm();
  if (n > 0) psi /= n;
  return psi;
}

double evaluate_ks(const QuantumMap& phi, int k, const BlockOperator& x) {
  return min_eigenvalue(amplified_ks_defect(phi, k, x));
}

double evaluate_co_ks(const QuantumMap& phi, const BlockOperator& x) {
  require_block(phi, 1, x, "evaluate_co_ks");
  return min_eigenvalue(co_ks_defect(phi, x.data()));
}

double evaluate_phi_k(const QuantumMap& phi, int k, const BlockOperator& x) {
  return min_eigenvalue(phi_k_defect(phi, k, x));
}

double evaluate_k_positivity(const QuantumMap& phi, const SchmidtWitness& w) {
  if (w.u.rows() != phi.d() || w.v.rows() != phi.d() || w.u.cols() != w.v.cols())
    throw DimensionError("evaluate_k_positivity: Schmidt factors do not match d");
  const ComplexVector psi = w.state();
  return (psi.adjoint() * choi(phi) * psi)(0, 0).real();
}

double reevaluate(const QuantumMap& phi, const CertificateVerdict& v) {
  if (!v.witness) throw DomainError("reevaluate: verdict has no witness");
  if (v.property == "k-positivity") return evaluate_k_positivity(phi, std::get<SchmidtWitness>(*v.witness));
  const auto& x = std::get<BlockOperator>(*v.witness);
  if (v.property == "ks") return evaluate_ks(phi, v.k, x);
  if (v.property == "co-ks") return evaluate_co_ks(phi, x);
  if (v.property == "phi-k") return evaluate_phi_k(phi, v.k, x);
  throw DomainError("reevaluate: unknown property '" + v.property + "'");
}

CertificateVerdict falsify_ks(const QuantumMap& phi, int k, const SearchBudget& budget) {
  budget.validate();
  if (k < 1) throw DomainError("falsify_ks: k must be >= 1");
  require_hermiticity_preserving(phi, "falsify_ks");
  const int n = k * phi.d();
  const SphereSearchResult res = minimize_min_eigenvalue(ks_objective(phi, k), n, n, budget);
  BlockOperator x(k, phi.d(), res.best_point);
  const double worst = evaluate_ks(phi, k, x);
  auto v = make_verdict("ks", k, worst, Witness{std::move(x)}, res.usage, budget);
  v.warnings = ks_warnings(phi);
  return v;
}

CertificateVerdict falsify_co_ks(const QuantumMap& phi, const SearchBudget& budget) {
  budget.validate();
  require_hermiticity_preserving(phi, "falsify_co_ks");
  const int n = phi.d();
  const SphereSearchResult res = minimize_min_eigenvalue(co_ks_objective(phi), n, n, budget);
  BlockOperator x(1, phi.d(), res.best_point);
  const double worst = evaluate_co_ks(phi, x);
  auto v = make_verdict("co-ks", 1, worst, Witness{std::move(x)}, res.usage, budget);
  v.warnings = ks_warnings(phi);
  return v;
}

CertificateVerdict check_phi_k_condition(const QuantumMap& phi, int k, const SearchBudget& budget) {
  budget.validate();
  if (k < 1) throw DomainError("check_phi_k_condition: k must be >= 1");
  const int n = k * phi.d();
  const SphereSearchResult res = minimize_min_eigenvalue(phi_k_objective(phi, k), n, n, budget);
  BlockOperator x(k, phi.d(), res.best_point);
  const double worst = evaluate_phi_k(phi, k, x);
  return make_verdict("phi-k", k, worst, Witness{std::move(x)}, res.usage, budget);
}

CertificateVerdict falsify_k_positivity(const QuantumMap& phi, int k, const SearchBudget& budget) {
  budget.validate();
  const int d = phi.d();
  if (k < 1 || k > d) {
    std::ostringstream os;
    os << "falsify_k_positivity: need 1 <= k <= d, got k=" << k << ", d=" << d;
    throw DomainError(os.str());
  }
  require_hermiticity_preserving(phi, "falsify_k_positivity");
  const ComplexMatrix c = choi(phi);
  const ComplexMatrix ch = 0.5 * (c + c.adjoint());
  const Rng root(budget.seed);
  std::vector<SchmidtOutcome> outcomes(budget.restarts);
  parallel_for(budget.restarts, [&](int r) {
    outcomes[r] = schmidt_search(ch, d, k, budget.max_iters, root.split(static_cast<std::uint64_t>(r)));
  });
  BudgetUsage usage;
  usage.restarts = budget.restarts;
  int best = 0;
  for (int r = 0; r < budget.restarts; ++r) {
    usage.iterations += outcomes[r].iterations;
    usage.evaluations += 2 * outcomes[r].iterations;
    if (outcomes[r].value < outcomes[best].value) best = r;
  }
  SchmidtWitness w = outcomes[best].witness;
  const double worst = evaluate_k_positivity(phi, w);
  return make_verdict("k-positivity", k, worst, Witness{std::move(w)}, usage, budget);
}

std::pair<std::vector<ComplexMatrix>, double> tuple_from_block_witness(const QuantumMap& phi,
                                                                      const BlockOperator& x) {
  const int k = x.k();
  const double scale = std::sqrt(static_cast<double>(k));
  std::vector<ComplexMatrix> best_tuple;
  double best = std::numeric_limits<double>::infinity();
  for (int m = 0; m < k; ++m) {
    std::vector<ComplexMatrix> tuple;
    for (int j = 0; j < k; ++j) tuple.push_back(scale * x.block(m, j));
    const double val = min_eigenvalue(kks_block_defect(phi, tuple));
    if (val < best) {
      best = val;
      best_tuple = std::move(tuple);
    }
  }
  return {std::move(best_tuple), best};
}

DeltaLemmaReport check_delta_lemma(int k, int d, int samples, std::uint64_t seed) {
  DeltaLemmaReport rep;
  rep.k = k;
  rep.d = d;
  rep.samples = samples;
  const QuantumMap delta = depolarizing(d);
  const ComplexMatrix tk = amplified_transfer(delta, k);
  rep.projector_residual = (tk * tk - tk).norm();
  const AmplifiedMap dk(delta, k);
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const ComplexMatrix x = ginibre(k * d, k * d, rng);
    const ComplexMatrix dx = dk(x);
    const ComplexMatrix prod = dx.adjoint() * dx;
    rep.multiplicative_residual = std::max(rep.multiplicative_residual, (dk(prod) - prod).norm());
    const ComplexMatrix y = x - dx;
    rep.kernel_residual = std::max(rep.kernel_residual, dk(y).norm());
    rep.annihilation_residual = std::max(rep.annihilation_residual, dk(y * dx).norm());
  }
  return rep;
}

KpImpliesKksReport check_kp_implies_kks(int d, int k, std::uint64_t seed, const SearchBudget& budget,
                                        int n_samples) {
  KpImpliesKksReport rep;
  rep.d = d;
  rep.k = k;
  for (int i = 0; i < n_samples; ++i) {
    const std::uint64_t s = splitmix64(seed + static_cast<std::uint64_t>(i));
    const int n_kraus = 1 + i % (d * d);
    const QuantumMap phi = sample_utp_cp(d, s, n_kraus);
    auto v = falsify_ks(phi, k, budget.with_seed(splitmix64(s)));
    if (v.violated()) ++rep.violations;
    rep.samples.push_back({s, n_kraus, std::move(v)});
  }
  return rep;
}

}  // namespace kslab
