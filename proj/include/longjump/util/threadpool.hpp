#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace longjump {

// Runs jobs 0..count-1 on up to `threads` workers.  Work is split into
// contiguous index ranges; results must be written to per-job slots so the
// outcome is identical for every thread count (all randomness is keyed by
// job index, never by thread).
inline void parallel_for_jobs(std::uint64_t count, unsigned threads,
                              const std::function<void(std::uint64_t)>& job) {
  if (threads <= 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) job(i);
    return;
  }
  unsigned n = std::min<std::uint64_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) {
    std::uint64_t lo = count * t / n, hi = count * (t + 1) / n;
    pool.emplace_back([lo, hi, &job] {
      for (std::uint64_t i = lo; i < hi; ++i) job(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace longjump
