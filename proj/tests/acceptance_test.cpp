#include <cstdio>
#include <exception>

#include "pwcvx/acceptance.hpp"

// Runs every acceptance criterion and prints one pass/fail line each, as
// soon as the criterion finishes. Exit status is nonzero on any failure.
int main() {
  int failed = 0;
  int total = pwcvx::criterion_count();
  for (int id = 1; id <= total; ++id) {
    pwcvx::CriterionResult r;
    try {
      r = pwcvx::run_criterion(id);
    } catch (const std::exception& ex) {
      r.id = id;
      r.name = pwcvx::criterion_name(id);
      r.pass = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    std::printf("%s criterion %2d: %s (%s) [%.1f s]\n",
                r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  if (failed == 0) {
    std::printf("all %d criteria passed\n", total);
    return 0;
  }
  std::printf("%d of %d criteria FAILED\n", failed, total);
  return 1;
}
