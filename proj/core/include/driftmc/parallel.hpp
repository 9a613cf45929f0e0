#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace driftmc {

// Runs fn(replica_index) for every index in [0, n_replicas) on up to
// n_threads workers. Results must be written into slots indexed by the
// replica index so that merged statistics do not depend on scheduling.
template <typename Fn>
void for_each_replica(std::int64_t n_replicas, int n_threads, Fn&& fn) {
  if (n_replicas <= 0) return;
  if (n_threads <= 1 || n_replicas == 1) {
    for (std::int64_t i = 0; i < n_replicas; ++i) fn(i);
    return;
  }
  const int workers =
      static_cast<int>(std::min<std::int64_t>(n_threads, n_replicas));
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n_replicas) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace driftmc
