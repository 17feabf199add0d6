#pragma once

#include <cstddef>
#include <functional>

namespace qcs {

/// Worker count: hardware concurrency, capped by QCS_THREADS when set.
unsigned thread_count();

/// Calls body(begin, end) on contiguous chunks of [0, n) across threads.
/// Results must not depend on the chunking.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace qcs
