// SPDX-License-Identifier: Apache-2.0

#include "liner/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace liner
{

namespace
{

std::atomic<unsigned> requested_threads{0};

unsigned env_threads()
{
  const char *value = std::getenv("LINERSOLVE_THREADS");
  if (value == nullptr || *value == '\0')
  {
    return 0;
  }
  try
  {
    const long n = std::stol(value);
    return n > 0 ? static_cast<unsigned>(n) : 0;
  }
  catch (const std::exception &)
  {
    return 0;
  }
}

}  // namespace

void set_thread_limit(unsigned threads) { requested_threads = threads; }

unsigned thread_limit()
{
  unsigned n = env_threads();
  if (n == 0)
  {
    n = requested_threads;
  }
  if (n == 0)
  {
    n = std::max(1u, std::thread::hardware_concurrency());
  }
  return n;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)> &body)
{
  const std::size_t workers = std::min<std::size_t>(thread_limit(), count);
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
    {
      body(i);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++)
    {
      try
      {
        body(i);
      }
      catch (...)
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
        {
          failure = std::current_exception();
        }
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t)
  {
    pool.emplace_back(worker);
  }
  worker();
  for (auto &thread : pool)
  {
    thread.join();
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }
}

}  // namespace liner
