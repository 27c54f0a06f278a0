#include "kslab/scan.hpp"

#include <algorithm>
#include <cmath>

#include "kslab/errors.hpp"
#include "kslab/random.hpp"

namespace kslab {

std::string_view direction_name(ScanDirection d) {
  return d == ScanDirection::Ascending ? "ascending" : "descending";
}

double family_bound(Family f, int d, int k, ScanDirection dir) {
  switch (f) {
    case Family::LambdaMinus:
    case Family::Reduction: return bound_lambda_minus(d, k);
    case Family::LambdaPlus: {
      const auto [lo, hi] = bounds_lambda_plus(d, k);
      return dir == ScanDirection::Descending ? lo : hi;
    }
    default: throw DomainError("scan: family '" + std::string(family_name(f)) + "' has no parameter a");
  }
}

ScanDirection default_direction(Family f) {
  return f == Family::LambdaPlus ? ScanDirection::Descending : ScanDirection::Ascending;
}

std::vector<double> scan_grid(double a_min, double a_max, double grid_step, ScanDirection dir) {
  if (!(a_min < a_max)) throw DomainError("scan: need a_min < a_max");
  if (!(grid_step > 0)) throw DomainError("scan: grid_step must be > 0");
  const auto n = static_cast<long>(std::floor((a_max - a_min) / grid_step + 1e-9));
  std::vector<double> grid;
  grid.reserve(n + 1);
  for (long i = 0; i <= n; ++i) {
    const double a = dir == ScanDirection::Ascending ? a_min + static_cast<double>(i) * grid_step
                                                     : a_max - static_cast<double>(i) * grid_step;
    // Snap to 1e-12 so grid points meant to sit on a bound (0.5, 0.75, ...) compare exactly.
    grid.push_back(std::round(a * 1e12) / 1e12);
  }
  return grid;
}

ScanResult scan_threshold(const FamilyParams& family, double a_min, double a_max, double grid_step,
                          const SearchBudget& budget, std::optional<ScanDirection> direction) {
  budget.validate();
  const ScanDirection dir = direction.value_or(default_direction(family.family));
  ScanResult res;
  res.family = std::string(family_name(family.family));
  res.base = family.base ? family.base->label() : (family.family == Family::Reduction ? "identity" : "");
  res.d = family.d;
  res.k = family.k_target;
  res.direction = dir;
  res.grid_step = grid_step;
  res.paper_bound = family_bound(family.family, family.d, family.k_target, dir);

  const std::vector<double> grid = scan_grid(a_min, a_max, grid_step, dir);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    FamilyParams p = family;
    p.a = grid[i];
    const QuantumMap phi = build_family(p);
    const auto v = falsify_ks(phi, family.k_target, budget.with_seed(splitmix64(budget.seed + i)));
    res.points.push_back({grid[i], v.verdict, v.worst_value});
    if (v.violated() && !res.a_first_violation) res.a_first_violation = grid[i];
    if (!v.violated() && !res.a_first_violation) res.a_certified_ks = grid[i];
  }
  std::sort(res.points.begin(), res.points.end(),
            [](const ScanPoint& x, const ScanPoint& y) { return x.a < y.a; });
  return res;
}

}  // namespace kslab
