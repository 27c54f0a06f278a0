#include "kslab/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "kslab/errors.hpp"

namespace kslab {

void SearchBudget::validate() const {
  if (restarts < 1) throw DomainError("SearchBudget: restarts must be >= 1");
  if (max_iters < 1) throw DomainError("SearchBudget: max_iters must be >= 1");
  if (!(step_init > 0)) throw DomainError("SearchBudget: step_init must be > 0");
  if (!(violation_tol > 0)) throw DomainError("SearchBudget: violation_tol must be > 0");
}

MinEigenpair min_eigenpair(const ComplexMatrix& h, Rng& rng, double degeneracy_gap) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const RealVector& ev = es.eigenvalues();
  Eigen::Index m = 1;
  while (m < ev.size() && ev(m) - ev(0) < degeneracy_gap) ++m;
  if (m == 1) return {ev(0), es.eigenvectors().col(0)};
  const ComplexVector c = random_unit_vector(m, rng);
  return {ev(0), es.eigenvectors().leftCols(m) * c};
}

double MinEigenObjective::value(const ComplexMatrix& x) const {
  return hermitian_min_eigenvalue(defect(x));
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min<int>(n, static_cast<int>(std::thread::hardware_concurrency())));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

namespace {

struct RestartOutcome {
  double value = 0.0;
  ComplexMatrix point;
  long iterations = 0;
  long evaluations = 0;
};

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-12;
constexpr double kProgressTol = 1e-12;
constexpr int kAlternatingWindow = 3;
constexpr int kDescentWindow = 10;

// Returns true when the last `window` entries improved by less than kProgressTol.
bool stalled(std::deque<double>& history, double fx, int window) {
  history.push_back(fx);
  if (static_cast<int>(history.size()) <= window) return false;
  const bool stop = history.front() - fx < kProgressTol;
  history.pop_front();
  return stop;
}

RestartOutcome run_restart(const MinEigenObjective& f, Eigen::Index rows, Eigen::Index cols,
                           const SearchBudget& budget, Rng rng) {
  RestartOutcome out;
  ComplexMatrix x = ginibre_unit(rows, cols, rng);
  MinEigenpair mp = min_eigenpair(f.defect(x), rng);
  ++out.evaluations;
  double fx = mp.value;
  int iters_left = budget.max_iters;

  // Phase 1: alternating exact minimization.
  if (f.quadratic_form) {
    std::deque<double> history{fx};
    while (iters_left > 0) {
      --iters_left;
      ++out.iterations;
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(f.quadratic_form(mp.vector));
      ComplexMatrix next = unvec(es.eigenvectors().col(0), rows);
      next /= next.norm();
      const MinEigenpair np = min_eigenpair(f.defect(next), rng);
      ++out.evaluations;
      if (np.value <= fx) {
        x = std::move(next);
        mp = np;
        fx = np.value;
      } else {
        break;
      }
      if (stalled(history, fx, kAlternatingWindow)) break;
    }
  }

  // Phase 2: projected gradient descent.
  std::deque<double> history{fx};
  ComplexMatrix grad = f.gradient(x, mp.vector);
  while (iters_left > 0) {
    --iters_left;
    ++out.iterations;
    const ComplexMatrix tangent = grad - hs_inner(x, grad).real() * x;
    const double slope = tangent.squaredNorm();
    if (slope < 1e-28) break;

    double step = budget.step_init;
    bool accepted = false;
    ComplexMatrix trial;
    while (step >= kMinStep) {
      trial = x - step * tangent;
      trial /= trial.norm();
      const double ftrial = f.value(trial);
      ++out.evaluations;
      if (ftrial <= fx - kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    x = std::move(trial);
    mp = min_eigenpair(f.defect(x), rng);
    ++out.evaluations;
    fx = mp.value;
    grad = f.gradient(x, mp.vector);
    if (stalled(history, fx, kDescentWindow)) break;
  }
  out.value = fx;
  out.point = std::move(x);
  return out;
}

}  // namespace

SphereSearchResult minimize_min_eigenvalue(const MinEigenObjective& f, Eigen::Index rows, Eigen::Index cols,
                                           const SearchBudget& budget) {
  budget.validate();
  const Rng root(budget.seed);
  std::vector<RestartOutcome> outcomes(budget.restarts);
  parallel_for(budget.restarts, [&](int r) {
    outcomes[r] = run_restart(f, rows, cols, budget, root.split(static_cast<std::uint64_t>(r)));
  });

  SphereSearchResult res;
  res.usage.restarts = budget.restarts;
  for (int r = 0; r < budget.restarts; ++r) {
    res.usage.iterations += outcomes[r].iterations;
    res.usage.evaluations += outcomes[r].evaluations;
    if (res.best_restart < 0 || outcomes[r].value < res.best_value) {
      res.best_value = outcomes[r].value;
      res.best_restart = r;
    }
  }
  res.best_point = std::move(outcomes[res.best_restart].point);
  return res;
}

}  // namespace kslab
