// Acceptance suite: runs every criterion at full scale and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.
//
// Usage: lpflow_acceptance [--quick] [--seed N]

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "lpflow/checks.hpp"

int main(int argc, char** argv) {
  bool quick = false;
  std::uint64_t seed = 2024;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      quick = true;
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else {
      std::fprintf(stderr, "unknown argument: %s\n", argv[i]);
      return 2;
    }
  }

  const auto results = lpflow::run_verification(quick, seed);
  int failures = 0;
  int index = 0;
  double total = 0.0;
  for (const auto& r : results) {
    ++index;
    total += r.seconds;
    std::printf("[%s] %d. %s (%.1fs) — %s\n", r.pass ? "PASS" : "FAIL", index,
                r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed in %.1fs%s\n", index - failures, results.size(),
              total, quick ? " (quick scale)" : "");
  return failures == 0 ? 0 : 1;
}
