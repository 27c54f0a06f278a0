#pragma once

// The acceptance battery: ten numbered criteria, each producing a pass flag
// and a JSON record of what was checked. Deterministic given the seed; only
// the "seconds" fields vary between runs.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kslab/io.hpp"
#include "kslab/optimizer.hpp"

namespace kslab {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct CriterionInfo {
  int id;
  std::string name;
  std::vector<std::string> tags;
};

const std::vector<CriterionInfo>& suite_criteria();

// Empty filter selects everything. Otherwise a criterion is selected when the
// filter equals its id, equals one of its tags, or is a case-insensitive
// substring of its name.
bool criterion_selected(const CriterionInfo& c, const std::string& filter);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;  // one line
  Json details;
  double seconds = 0.0;
};

struct SuiteOptions {
  std::uint64_t seed = kDefaultSeed;
  std::string filter;
  SearchBudget budget;  // restarts / max_iters / step_init / violation_tol; seeds are derived per check
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::string filter;
  std::vector<CriterionResult> results;

  bool passed() const;
  // Timing fields are omitted when include_timing is false, which makes the
  // output byte-identical across runs with the same seed.
  Json to_json(bool include_timing = true) const;
};

// Runs one criterion by id (1..10).
CriterionResult run_criterion(int id, const SuiteOptions& options);

// Runs the selected criteria in id order; on_result is called after each.
SuiteReport run_suite(const SuiteOptions& options,
                      const std::function<void(const CriterionResult&)>& on_result = {});

// FNV-1a digest of the bit patterns of a sequence of doubles, as 16 hex digits.
std::string digest(const std::vector<double>& values);
std::string witness_digest(const Witness& w);

}  // namespace kslab
