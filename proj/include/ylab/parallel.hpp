#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ylab {

/// Worker cap: YOSIDA_LAB_THREADS if set, else the hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("YOSIDA_LAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

/// Runs body(i) for i in [0, count). Each index writes only its own output
/// slot, so results do not depend on scheduling. The first exception (by
/// index) is rethrown.
template <typename Body>
void parallel_for(size_t count, Body&& body) {
  const unsigned workers = std::min<size_t>(worker_count(), count);
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < count; i += workers) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ylab
