#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kslab/certify.hpp"
#include "kslab/map_zoo.hpp"

namespace kslab {

// Ascending scans walk a_min -> a_max and look for the first violation above
// a certified prefix (lambda-minus, reduction). Descending scans walk
// a_max -> a_min (lower branch of lambda-plus).
enum class ScanDirection { Ascending, Descending };

std::string_view direction_name(ScanDirection d);

struct ScanPoint {
  double a;
  Verdict verdict;
  double worst_value;
};

struct ScanResult {
  std::string family;
  std::string base;
  int d = 0;
  int k = 0;
  ScanDirection direction = ScanDirection::Ascending;
  // Last grid point of the violation-free prefix in scan order, and the first
  // violated grid point. Empty when no such point exists.
  std::optional<double> a_certified_ks;
  std::optional<double> a_first_violation;
  double paper_bound = 0.0;
  double grid_step = 0.0;
  std::vector<ScanPoint> points;  // sorted by ascending a
};

// Closed-form k-KS threshold for a family: d/(kd+1) for lambda-minus and
// reduction, the lower (descending) or upper (ascending) root for lambda-plus.
double family_bound(Family f, int d, int k, ScanDirection dir);

ScanDirection default_direction(Family f);

// Grid in scan order. Point i sits at a_min + i*step (ascending) or
// a_max - i*step (descending), rounded to 1e-12; the far end is included
// when it lies on the grid.
std::vector<double> scan_grid(double a_min, double a_max, double grid_step, ScanDirection dir);

// Runs falsify_ks at level family.k_target on every grid point. Grid point i
// uses seed splitmix64(budget.seed + i).
ScanResult scan_threshold(const FamilyParams& family, double a_min, double a_max, double grid_step,
                          const SearchBudget& budget, std::optional<ScanDirection> direction = std::nullopt);

}  // namespace kslab
