#pragma once

#include <cstddef>
#include <functional>

namespace lineglow {

/// Worker count: hardware concurrency, capped by LINEGLOW_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [begin, end) across worker_count() threads in contiguous chunks.
/// Bodies must write disjoint outputs; results are then independent of the thread count.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace lineglow
