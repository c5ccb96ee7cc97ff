#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace hurl::cli {

/// Evaluates f(0..n-1) on a small worker pool; result i lands in slot i, so
/// the output order never depends on scheduling.
template <typename F>
auto parallel_map(long n, unsigned threads, F f) -> std::vector<std::invoke_result_t<F, long>> {
  using R = std::invoke_result_t<F, long>;
  std::vector<R> results(static_cast<std::size_t>(std::max(n, 0L)));
  if (n <= 0) return results;
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<long>(workers, n));

  std::atomic<long> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (long i = next++; i < n; i = next++) results[static_cast<std::size_t>(i)] = f(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace hurl::cli
