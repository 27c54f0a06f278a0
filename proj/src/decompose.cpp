#include "kslab/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kslab/errors.hpp"
#include "kslab/map_zoo.hpp"
#include "kslab/random.hpp"

namespace kslab {

namespace {

// X -> c_tr Tr(X) I + c_x X.
QuantumMap trace_plus_scalar(int d, double c_tr, double c_x, std::string label) {
  const QuantumMap delta = depolarizing(d);
  const QuantumMap id = identity_map(d);
  return (c_tr * d * delta + c_x * id).relabeled(std::move(label));
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require(bool ok, const std::string& inequality, const std::string& values) {
  if (!ok) throw ConstructionError("decompose_reduction: derived inequality fails: " + inequality + " (" + values + ")");
}

}  // namespace

double lambda_plus_T_threshold(int d) {
  if (d < 1) throw DimensionError("lambda_plus_T_threshold: d must be >= 1");
  const double dd = d;
  return (2.0 * dd + 1.0 - std::sqrt(4.0 * dd + 1.0)) / (2.0 * dd);
}

DecompositionResult decompose_lambda_plus_T(int d, double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("decompose_lambda_plus_T: need 0 <= a <= 1, got a=" + fmt(a));
  const QuantumMap t = transposition(d);
  const QuantumMap target = lambda_plus(t, a);
  const double thr = lambda_plus_T_threshold(d);
  const bool trivial = a >= thr;
  const double lambda = trivial ? 1.0 : a / thr;
  const double beta = trivial ? a : thr;
  DecompositionResult r{
      "lambda-plus-T", d, a, lambda, lambda_plus(t, beta), t, LambdaPlusParams{lambda, beta}, 0.0};
  r.residual = transfer_distance(lambda * r.phi1 + (1.0 - lambda) * r.phi2, target);
  return r;
}

ReductionFeasibility reduction_feasibility(int d, double a, int grid_points) {
  if (d < 2) throw DimensionError("reduction_feasibility: d must be >= 2");
  if (!(a < d)) throw DomainError("reduction_feasibility: need a < d");
  if (grid_points < 2) throw DomainError("reduction_feasibility: grid_points must be >= 2");
  const double dd = d;
  const double alpha_max = 1.0 / (dd - a);
  ReductionFeasibility best;
  best.grid_points = grid_points;
  bool first = true;
  // Interior grid of (0, alpha_max): both ends are excluded by gamma > 0 and alpha > 0.
  for (int i = 1; i <= grid_points; ++i) {
    const double alpha = alpha_max * i / (grid_points + 1.0);
    const double lo = std::max(alpha * dd * dd / (dd + 1.0), 0.0);
    const double hi = std::min({alpha * dd, (dd - 1.0) * alpha + (1.0 - a) / (dd - a), 1.0});
    if (first || hi - lo > best.width()) {
      best.alpha = alpha;
      best.lambda_lo = lo;
      best.lambda_hi = hi;
      first = false;
    }
  }
  best.feasible = best.width() >= 0.0 && best.lambda_hi > 0.0;
  return best;
}

DecompositionResult decompose_reduction(int d, double a) {
  if (d < 2) throw DimensionError("decompose_reduction: d must be >= 2");
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("decompose_reduction: need 0 <= a <= 1, got a=" + fmt(a));
  const double dd = d;
  const QuantumMap target = reduction(d, a);

  if (a <= dd / (dd + 1.0)) {
    const ReductionParams p{1.0 / (dd - a), a / (dd - a), 0.0, 0.0};
    DecompositionResult r{"reduction", d, a, 1.0, target, depolarizing(d), p, 0.0};
    r.residual = transfer_distance(r.phi1, target);
    return r;
  }

  if (a == 1.0) {
    const ReductionFeasibility f = reduction_feasibility(d, a);
    if (!f.feasible) {
      std::ostringstream os;
      os.precision(6);
      os << "decompose_reduction: a = 1 admits no (alpha, lambda) with alpha d^2/(d+1) <= lambda <= "
            "min{alpha d, (d-1) alpha + (1-a)/(d-a)}; widest interval over "
         << f.grid_points << " alpha values has width " << f.width() << " at alpha = " << f.alpha;
      throw ConstructionError(os.str());
    }
  }

  const double alpha = (1.0 - a) / (dd - a);
  const double lo = alpha * dd * dd / (dd + 1.0);
  const double hi = alpha * dd;
  const double lambda = 0.5 * (lo + hi);
  const double beta = alpha * dd - lambda;
  const double gamma = 1.0 / (dd - a) - alpha;
  const double delta = alpha * dd - lambda - a / (dd - a);

  require(alpha > 0.0, "alpha > 0", "alpha=" + fmt(alpha));
  require(beta > 0.0, "beta > 0", "beta=" + fmt(beta));
  require(gamma > 0.0, "gamma > 0", "gamma=" + fmt(gamma));
  require(lambda > 0.0 && lambda < 1.0, "0 < lambda < 1", "lambda=" + fmt(lambda));
  require(lo <= hi, "alpha d^2/(d+1) <= alpha d", "lo=" + fmt(lo) + ", hi=" + fmt(hi));
  require(delta < 0.0, "delta < 0", "delta=" + fmt(delta));
  require(-delta / gamma <= 1.0, "-delta/gamma <= 1", "-delta/gamma=" + fmt(-delta / gamma));
  require(beta / alpha <= dd / (dd + 1.0), "beta/alpha <= d/(d+1)", "beta/alpha=" + fmt(beta / alpha));

  QuantumMap phi1 = trace_plus_scalar(d, alpha / lambda, -beta / lambda, "reduction-ks-part");
  QuantumMap phi2 = trace_plus_scalar(d, gamma / (1.0 - lambda), delta / (1.0 - lambda), "reduction-co-ks-part");
  DecompositionResult r{"reduction", d, a, lambda, std::move(phi1), std::move(phi2),
                        ReductionParams{alpha, beta, gamma, delta}, 0.0};
  r.residual = transfer_distance(lambda * r.phi1 + (1.0 - lambda) * r.phi2, target);
  return r;
}

double parameter_identity_residual(const DecompositionResult& r) {
  if (const auto* p = std::get_if<LambdaPlusParams>(&r.params)) return std::abs(p->lambda * p->beta - r.a);
  const auto& p = std::get<ReductionParams>(r.params);
  const double dd = r.d;
  return std::max({std::abs(p.alpha + p.gamma - 1.0 / (dd - r.a)), std::abs(p.beta - p.delta - r.a / (dd - r.a)),
                   std::abs(p.alpha * dd - p.beta - r.lambda), std::abs(p.gamma * dd + p.delta - (1.0 - r.lambda))});
}

ComplexMatrix jordan_defect(const QuantumMap& phi1, const QuantumMap& phi2, double lambda, const ComplexMatrix& x) {
  if (phi1.d() != phi2.d()) throw DimensionError("jordan_defect: phi1 and phi2 act on different dimensions");
  if (x.rows() != phi1.d() || x.cols() != phi1.d()) throw DimensionError("jordan_defect: X must be d x d");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("jordan_defect: need 0 <= lambda <= 1");
  const ComplexMatrix y1 = phi1(x);
  const ComplexMatrix y2 = phi2(x);
  const ComplexMatrix xx = jordan(x.adjoint(), x);
  const ComplexMatrix y = lambda * y1 + (1.0 - lambda) * y2;
  const ComplexMatrix diff = y1 - y2;
  const ComplexMatrix phi_xx = lambda * phi1(xx) + (1.0 - lambda) * phi2(xx);
  return phi_xx - jordan(y.adjoint(), y) - lambda * (1.0 - lambda) * jordan(diff.adjoint(), diff);
}

ComplexMatrix stormer_defect(const QuantumMap& phi, const ComplexMatrix& x) {
  if (x.rows() != phi.d() || x.cols() != phi.d()) throw DimensionError("stormer_defect: X must be d x d");
  const ComplexMatrix gap = ComplexMatrix::Identity(phi.d(), phi.d()) - phi(ComplexMatrix::Identity(phi.d(), phi.d()));
  if (!is_hermitian(gap) || !is_psd(gap)) throw DomainError("stormer_defect: precondition Phi(I) <= I fails");
  const ComplexMatrix y = phi(x);
  return phi(jordan(x.adjoint(), x)) - jordan(y.adjoint(), y);
}

bool DecompositionReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const DecompositionCheck& c) { return c.passed; });
}

QuantumMap decomposition_target(const DecompositionResult& r) {
  if (r.target == "reduction") return reduction(r.d, r.a);
  if (r.target == "lambda-plus-T") return lambda_plus(transposition(r.d), r.a);
  throw DomainError("decomposition_target: unknown target '" + r.target + "'");
}

DecompositionReport verify_decomposition(const DecompositionResult& r, const QuantumMap& target,
                                         const SearchBudget& budget) {
  budget.validate();
  DecompositionReport rep;
  rep.checks.resize(4);
  parallel_for(4, [&](int i) {
    DecompositionCheck& c = rep.checks[i];
    switch (i) {
      case 0: {
        c.name = "reconstruction";
        if (!(r.lambda >= 0.0 && r.lambda <= 1.0) || r.phi1.d() != target.d() || r.phi2.d() != target.d()) {
          c.value = std::numeric_limits<double>::infinity();
          c.detail = "lambda outside [0, 1] or dimension mismatch";
          break;
        }
        c.value = transfer_distance(r.lambda * r.phi1 + (1.0 - r.lambda) * r.phi2, target);
        c.passed = c.value <= kReconstructionTol;
        c.detail = "||lambda phi1 + (1 - lambda) phi2 - target||";
        break;
      }
      case 1: {
        c.name = "phi1-ks";
        const auto v = falsify_ks(r.phi1, 1, budget.with_seed(splitmix64(budget.seed + 1)));
        c.value = v.worst_value;
        c.passed = !v.violated();
        c.detail = std::string(verdict_name(v.verdict));
        break;
      }
      case 2: {
        c.name = "phi2-co-ks";
        const auto v = falsify_co_ks(r.phi2, budget.with_seed(splitmix64(budget.seed + 2)));
        c.value = v.worst_value;
        c.passed = !v.violated();
        c.detail = std::string(verdict_name(v.verdict));
        break;
      }
      default: {
        c.name = "jordan-psd";
        if (r.phi1.d() != r.phi2.d() || !(r.lambda >= 0.0 && r.lambda <= 1.0)) {
          c.value = -std::numeric_limits<double>::infinity();
          c.detail = "lambda outside [0, 1] or dimension mismatch";
          break;
        }
        Rng rng(splitmix64(budget.seed + 3));
        double worst = std::numeric_limits<double>::infinity();
        for (int s = 0; s < kJordanSamples; ++s) {
          const ComplexMatrix x = ginibre_unit(r.phi1.d(), r.phi1.d(), rng);
          worst = std::min(worst, min_eigenvalue(jordan_defect(r.phi1, r.phi2, r.lambda, x)));
        }
        c.value = worst;
        c.passed = worst >= -budget.violation_tol;
        c.detail = "minimal eigenvalue over " + std::to_string(kJordanSamples) + " random X";
      }
    }
  });
  return rep;
}

}  // namespace kslab
