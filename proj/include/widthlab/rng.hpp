#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <random>
#include <string_view>
#include <thread>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

namespace widthlab {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent streams from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// FNV-1a, stable across platforms (std::hash is not).
std::uint64_t hash_name(std::string_view name);

Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

Eigen::VectorXd gaussian_vector(std::size_t n, Rng& rng);

/// Worker count: WIDTHLAB_THREADS if set and positive, else hardware threads.
std::size_t worker_count();

/// Runs task(i) for i in [0, count) on up to worker_count() threads and
/// returns the results in index order. Output does not depend on the number
/// of workers as long as each task is a pure function of its index.
template <class Task>
auto parallel_map(std::size_t count, Task task)
    -> std::vector<decltype(task(std::size_t{}))> {
  using Result = decltype(task(std::size_t{}));
  static_assert(!std::is_same_v<Result, bool>, "vector<bool> is not safe for concurrent writes");
  std::vector<Result> results(count);
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = task(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) results[i] = task(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace widthlab
