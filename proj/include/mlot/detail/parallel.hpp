#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace mlot::detail {

/// Runs `fn(begin, end, out)` over contiguous chunks of [0, count), one
/// thread per chunk, and concatenates the per-chunk outputs in index order.
/// Small workloads run on the calling thread.
template <class T, class Fn>
std::vector<T> parallel_collect(std::size_t count, std::size_t work_per_item, Fn&& fn) {
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (count * work_per_item < (std::size_t{1} << 18)) threads = 1;
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  std::vector<std::vector<T>> parts(threads);
  if (threads == 1) {
    fn(std::size_t{0}, count, parts[0]);
    return std::move(parts[0]);
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t step = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = std::min(count, t * step);
    const std::size_t end = std::min(count, begin + step);
    pool.emplace_back([&fn, &parts, t, begin, end] { fn(begin, end, parts[t]); });
  }
  for (auto& th : pool) th.join();
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<T> out;
  out.reserve(total);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace mlot::detail
