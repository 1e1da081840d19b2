#pragma once

// The acceptance suite: one check per criterion, each at its stated
// tolerance and time budget. Shared by tests/acceptance and `binpat verify-all`.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace binpat::verify {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  /// A failure whose cause has been analysed (a disagreement with a quoted
  /// value, not a defect of the implementation).
  bool known_failure = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  /// Criterion ids to run; empty runs all ten.
  std::vector<int> only;
};

/// Runs the criteria in order, calling `report` after each one.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {},
                                            const std::function<void(const CriterionResult&)>& report = {});

/// "[PASS] 4  title ... detail (12.3 s / 120 s)".
std::string format_result(const CriterionResult& r);

/// True when every failure is a known one.
bool acceptable(const std::vector<CriterionResult>& results);

}  // namespace binpat::verify
