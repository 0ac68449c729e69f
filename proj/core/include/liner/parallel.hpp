// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_PARALLEL_HPP
#define LINER_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace liner
{

// Worker cap for parallel loops. 0 means hardware concurrency. The environment variable
// LINERSOLVE_THREADS, when set, overrides whatever was requested here.
void set_thread_limit(unsigned threads);
unsigned thread_limit();

// Runs body(i) for i in [0, count). Iterations must write to disjoint state; results
// are identical for any thread count since no reduction happens here.
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &body);

}  // namespace liner

#endif  // LINER_PARALLEL_HPP
