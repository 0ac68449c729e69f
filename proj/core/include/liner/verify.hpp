// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_VERIFY_HPP
#define LINER_VERIFY_HPP

#include <functional>
#include <string>
#include <vector>

namespace liner::verify
{

enum class Level
{
  Quick,
  Full
};

struct CheckResult
{
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

using Check = std::function<CheckResult(Level)>;

// The built-in suites, in order.
std::vector<Check> suites();

std::vector<CheckResult> run_all(Level level,
                                 const std::function<void(const CheckResult &)> &on_result = {});

}  // namespace liner::verify

#endif  // LINER_VERIFY_HPP
