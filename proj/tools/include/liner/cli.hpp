// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_CLI_HPP
#define LINER_CLI_HPP

#include <iosfwd>

namespace liner::cli
{

// Exit codes of run().
constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kNumerical = 2;

// Entry point of the linersolve tool. Subcommands: mesh, zone, measure-check, solve, sweep,
// optimize, verify. Diagnostics go to `err`, tables and progress to `out`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);
int run(int argc, const char *const *argv);

}  // namespace liner::cli

#endif  // LINER_CLI_HPP
