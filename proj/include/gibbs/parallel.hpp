#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace gibbs {

/// Worker count: GIBBS_LDP_THREADS if set and positive, else the hardware
/// concurrency.
inline std::size_t replica_threads() {
  if (const char* env = std::getenv("GIBBS_LDP_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs f(0..count-1) on up to replica_threads() workers. Results are indexed
/// by replica, so the output never depends on scheduling. The first exception
/// (lowest replica index) is rethrown.
template <class R, class F>
std::vector<R> run_replicas(std::size_t count, F&& f) {
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errors(count);
  const std::size_t workers = std::min(count, replica_threads());
  auto work = [&](std::atomic<std::size_t>& next) {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        out[k] = f(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::atomic<std::size_t> next{0};
  if (workers <= 1) {
    work(next);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back([&] { work(next); });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace gibbs
