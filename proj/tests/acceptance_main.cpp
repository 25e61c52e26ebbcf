// Acceptance gate: runs every verification criterion at the full tier and
// prints one pass/fail line per criterion.  Exit status 0 iff all pass.
// Set MONGELAB_ACCEPTANCE_TIER=smoke to run the reduced-budget tier instead.

#include <cstdio>
#include <cstdlib>

#include "mongelab/verify.hpp"

int main() {
  mongelab::VerifyOptions opt;
  if (const char* tier = std::getenv("MONGELAB_ACCEPTANCE_TIER")) opt.tier = tier;
  mongelab::VerifySummary summary = mongelab::verify_all(opt);
  for (const auto& r : summary.results)
    std::printf("[%s] C%d %s (%.1f s) %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds, r.details.c_str());
  std::printf("%s: %zu criteria, tier %s\n", summary.all_pass ? "ACCEPTED" : "REJECTED",
              summary.results.size(), summary.tier.c_str());
  return summary.all_pass ? 0 : 1;
}
