// SPDX-License-Identifier: Apache-2.0

#include "subwave/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace subwave
{

namespace
{

int InitialThreads()
{
  if (const char *env = std::getenv("SUBWAVE_THREADS"))
  {
    try
    {
      return std::max(1, std::stoi(env));
    }
    catch (const std::exception &)
    {
      return 1;
    }
  }
  return 1;
}

std::atomic<int> g_threads{InitialThreads()};

}  // namespace

void SetNumThreads(int n) { g_threads = std::max(1, n); }

int NumThreads() { return g_threads; }

void ParallelFor(std::size_t num_chunks, const std::function<void(std::size_t)> &body)
{
  const std::size_t workers = std::min<std::size_t>(g_threads, num_chunks);
  if (workers <= 1)
  {
    for (std::size_t c = 0; c < num_chunks; ++c)
    {
      body(c);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&]()
  {
    for (std::size_t c = next++; c < num_chunks; c = next++)
    {
      try
      {
        body(c);
      }
      catch (...)
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error)
        {
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w)
  {
    pool.emplace_back(run);
  }
  run();
  for (auto &t : pool)
  {
    t.join();
  }
  if (error)
  {
    std::rethrow_exception(error);
  }
}

}  // namespace subwave
