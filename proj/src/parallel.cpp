#include "lpkdv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace lpkdv {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_thread_count(unsigned k) { g_threads = std::max(1u, k); }

unsigned thread_count() { return g_threads; }

void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& body) {
  const std::ptrdiff_t count = end - begin;
  if (count <= 0) return;
  const auto workers =
      static_cast<std::ptrdiff_t>(std::min<std::ptrdiff_t>(thread_count(), count));
  if (workers <= 1) {
    for (std::ptrdiff_t i = begin; i < end; ++i) body(i);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::ptrdiff_t chunk = (count + workers - 1) / workers;
  for (std::ptrdiff_t w = 0; w < workers; ++w) {
    const std::ptrdiff_t lo = begin + w * chunk;
    const std::ptrdiff_t hi = std::min(end, lo + chunk);
    pool.emplace_back([&, w, lo, hi] {
      for (std::ptrdiff_t i = lo; i < hi; ++i) {
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  // Chunks are ordered, so the first failing chunk holds the lowest index.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace lpkdv
