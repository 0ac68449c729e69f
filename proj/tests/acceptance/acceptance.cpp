// SPDX-License-Identifier: Apache-2.0
//
// Runs every acceptance criterion at full resolution and prints one line per criterion.

#include <cstdio>

#include "liner/verify.hpp"

int main()
{
  int failed = 0;
  const auto results = liner::verify::run_all(liner::verify::Level::Full, [&](const auto &r) {
    std::printf("[%s] criterion %d: %s (%.1f s)\n      %s\n", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
  });
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 && !results.empty() ? 0 : 1;
}
