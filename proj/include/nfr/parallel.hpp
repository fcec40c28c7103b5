#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace nfr {

/// Worker count: hardware concurrency, capped by the NFR_THREADS environment variable.
std::size_t thread_count();

/// Splits [begin, end) into contiguous chunks and calls fn(chunk_begin, chunk_end) on each,
/// possibly concurrently. Chunks never overlap, so fn may write disjoint outputs freely.
template <typename Index, typename Fn>
void parallel_for(Index begin, Index end, Index min_chunk, Fn&& fn) {
  if (end <= begin) return;
  const auto total = static_cast<std::size_t>(end - begin);
  const std::size_t chunk_floor = std::max<std::size_t>(1, static_cast<std::size_t>(min_chunk));
  const std::size_t workers = std::min(thread_count(), (total + chunk_floor - 1) / chunk_floor);
  if (workers <= 1) {
    fn(begin, end);
    return;
  }
  const std::size_t chunk = (total + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const auto b = begin + static_cast<Index>(std::min(total, w * chunk));
    const auto e = begin + static_cast<Index>(std::min(total, (w + 1) * chunk));
    if (b < e) pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  fn(begin, begin + static_cast<Index>(std::min(total, chunk)));
}

}  // namespace nfr
