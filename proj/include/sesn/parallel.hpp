#ifndef SESN_PARALLEL_HPP
#define SESN_PARALLEL_HPP

#include <cstdlib>
#include <thread>
#include <vector>

namespace sesn {

/// Worker count: SESN_THREADS overrides, else hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("SESN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace detail {
inline bool& in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

/// Runs f(i) for i in [0, n). Work is split into contiguous chunks across
/// threads; nested calls degrade to a serial loop. Each index must write
/// only its own slots, so results are identical for any thread count.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  if (n == 0) return;
  const unsigned workers =
      detail::in_parallel_region() ? 1u : std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      detail::in_parallel_region() = true;
      for (std::size_t i = lo; i < hi; ++i) f(i);
      detail::in_parallel_region() = false;
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sesn

#endif  // SESN_PARALLEL_HPP
