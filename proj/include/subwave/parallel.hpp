// SPDX-License-Identifier: Apache-2.0

#ifndef SUBWAVE_PARALLEL_HPP
#define SUBWAVE_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace subwave
{

// Worker count used by ParallelFor. Defaults to SUBWAVE_THREADS or 1.
void SetNumThreads(int n);
int NumThreads();

// Runs body(chunk) for chunk = 0..num_chunks-1. Callers keep per-chunk
// results and reduce them in chunk order, so results do not depend on the
// worker count.
void ParallelFor(std::size_t num_chunks, const std::function<void(std::size_t)> &body);

}  // namespace subwave

#endif  // SUBWAVE_PARALLEL_HPP
