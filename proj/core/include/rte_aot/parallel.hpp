#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace rte_aot
{
//! Number of worker threads used by parallel_for (default: hardware).
void set_thread_count(unsigned n);
unsigned thread_count();

//! Run body(i) for i in [0, n) in contiguous static chunks.
//! Each index must write only to its own outputs, so results do not
//! depend on the thread count.
void parallel_for(std::size_t n, std::function<void(std::size_t)> const& body);

}  // namespace rte_aot
