#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace covctl {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Runs the ten acceptance checks in order, streaming one line per criterion to
// `log` when non-null. Deterministic apart from the elapsed-time figures,
// which appear only in the detail strings.
std::vector<CriterionResult> run_acceptance(std::ostream* log);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace covctl
