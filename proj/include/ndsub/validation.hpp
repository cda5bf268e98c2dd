#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ndsub {

struct CheckResult {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  /// true: pass when value <= tolerance (a residual); false: pass when value >
  /// tolerance (a margin that must stay open).
  bool upper_bound = true;
  bool passed = false;
};

struct ValidationOptions {
  /// Perturbs one off-diagonal of the 4-state generator (keeping rows summing
  /// to zero) to demonstrate that the reversibility check trips.
  bool inject_fault = false;
};

/// Generator sanity, closed forms against the matrix exponential, reversibility,
/// derivative identities and lumping consistency.
std::vector<CheckResult> run_validation(const ValidationOptions& options = {});

void write_validation_report(std::ostream& out, const std::vector<CheckResult>& results);
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace ndsub
