#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kb {

struct CriterionResult {
  int id;
  std::string title;
  std::vector<std::string> tags;
  bool passed;
  std::string detail;
  double seconds;
};

/// Runs the acceptance criteria. `only` selects by number ("4") or tag ("lerch", "poincare", ...);
/// empty runs everything. Unknown selectors raise ConfigError.
std::vector<CriterionResult> run_acceptance(const std::string& only = "");

/// One line per criterion plus a summary line; returns true iff all passed.
bool print_acceptance(const std::vector<CriterionResult>& results, std::ostream& os);

}  // namespace kb
