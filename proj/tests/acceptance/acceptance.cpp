// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include "treelogic/acceptance.hpp"
#include "treelogic/errors.hpp"

#include <cstdio>
#include <exception>

int main() {
  using treelogic::acceptance::CriterionResult;
  bool ok = true;
  try {
    treelogic::acceptance::run_all([&](const CriterionResult& r) {
      ok = ok && r.passed;
      std::printf("%s %d %s: %s (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(),
                  r.detail.c_str(), r.seconds);
      std::fflush(stdout);
    });
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  return ok ? 0 : 1;
}
