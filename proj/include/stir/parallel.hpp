#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace stir {

inline int default_threads() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs f(replica) for replica = 0..n-1 across `threads` threads in contiguous
// chunks.  Callers derive per-replica RNG streams from the replica index and
// write results into per-replica slots, so the outcome is independent of the
// thread count.
inline void parallel_replicas(long n, int threads, const std::function<void(long)>& f) {
  if (threads <= 0) threads = default_threads();
  threads = static_cast<int>(std::min<long>(threads, std::max<long>(n, 1)));
  if (threads <= 1) {
    for (long r = 0; r < n; ++r) f(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const long chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const long lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (long r = lo; r < hi; ++r) f(r);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace stir
