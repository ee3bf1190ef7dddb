#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace fredholm::detail {

// Runs fn(lo, hi) over a partition of [begin, end) on up to `threads`
// workers. Chunking only affects scheduling; callers keep determinism by
// writing results through the index. The first exception is rethrown on the
// calling thread.
inline void parallel_for_chunks(std::int64_t begin, std::int64_t end, int threads,
                                const std::function<void(std::int64_t, std::int64_t)>& fn) {
  const std::int64_t count = end - begin;
  if (count <= 0) return;
  const int workers =
      static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, count)));
  if (workers == 1) {
    fn(begin, end);
    return;
  }

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  std::vector<std::exception_ptr> errors(workers);
  const std::int64_t chunk = (count + workers - 1) / workers;

  auto run = [&](int w) {
    const std::int64_t lo = begin + w * chunk;
    const std::int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) return;
    try {
      fn(lo, hi);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  for (int w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fredholm::detail
