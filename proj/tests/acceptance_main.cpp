#include <iostream>

#include "covctl/verification.hpp"

int main() {
  const auto results = covctl::run_acceptance(&std::cout);
  const bool ok = covctl::all_passed(results);
  std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: FAILURES present")
            << std::endl;
  return ok ? 0 : 1;
}
