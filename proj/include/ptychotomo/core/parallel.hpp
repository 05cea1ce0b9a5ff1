#pragma once

#include <cstddef>
#include <functional>

namespace ptychotomo {

/// Worker count: hardware concurrency, capped by the PTYCHO_THREADS environment variable.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Indices are split into contiguous blocks, one per worker.
/// Bodies must write to disjoint outputs; any reduction happens afterwards in index order,
/// so results do not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ptychotomo
