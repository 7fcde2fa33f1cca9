#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace splitreg {

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Callers must write
/// results into preallocated per-index slots; combined with counter-derived RNG
/// streams this keeps every output byte-identical for any value of `jobs`.
/// The first exception thrown by any fn(i) is rethrown on the calling thread.
inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  int workers = std::max(1, jobs);
  workers = static_cast<int>(std::min<std::size_t>(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Pairwise (cascade) summation: a fixed, platform-independent reduction order
/// that is also more accurate than a running sum.
inline double pairwise_sum(const double* data, std::size_t count) {
  if (count == 0) return 0.0;
  if (count <= 8) {
    double s = data[0];
    for (std::size_t i = 1; i < count; ++i) s += data[i];
    return s;
  }
  std::size_t half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

inline double pairwise_mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace splitreg
