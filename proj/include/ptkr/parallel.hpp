#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace ptkr {

/// Evaluates fn(0..count-1) on up to `workers` threads and returns results in index order.
///
/// Items are claimed dynamically, so completion order varies, but each item
/// is computed by exactly one call and placed at its own index.  If any call
/// throws, the exception of the lowest failing index is rethrown after all
/// workers have stopped.
template <class Fn>
auto parallel_map(std::size_t count, int workers, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using T = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto body = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t n_threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (n_threads <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(body);
  }

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace ptkr
