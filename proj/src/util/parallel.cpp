#include "smpe/util/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace smpe {

std::size_t default_threads() {
  if (const char* env = std::getenv("SMPE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // unparsable values fall through to the hardware default
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = default_threads();
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::exception_ptr failure;
  std::mutex lock;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t lo = n * t / threads;
      const std::size_t hi = n * (t + 1) / threads;
      pool.emplace_back([&, lo, hi] {
        try {
          for (std::size_t k = lo; k < hi; ++k) fn(k);
        } catch (...) {
          const std::scoped_lock guard(lock);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace smpe
