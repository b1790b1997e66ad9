#pragma once

#include <cstddef>
#include <functional>

namespace anonkit {

/// Worker count for parallel sections: hardware concurrency capped by the
/// ANONKIT_THREADS environment variable (values < 1 mean single-threaded).
std::size_t worker_count();

/// Runs fn(i) for i in [0, n). Work items must be independent; results must
/// not depend on the number of workers (callers write into pre-sized slots).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace anonkit
