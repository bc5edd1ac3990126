#pragma once

// Chunked work distribution. Workers pull chunk indices from a shared
// counter; callers store results per chunk and merge them in chunk order.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace exlift::detail {

inline unsigned worker_count(unsigned jobs, std::size_t chunks) {
  std::size_t n = std::max<std::size_t>(1, std::min<std::size_t>(jobs == 0 ? 1 : jobs, chunks));
  return static_cast<unsigned>(n);
}

template <class Fn>
void run_chunks(std::size_t chunks, unsigned workers, Fn&& fn) {
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(0u, c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned id = 0; id < workers; ++id) {
    threads.emplace_back([&, id] {
      try {
        for (std::size_t c = next++; c < chunks; c = next++) fn(id, c);
      } catch (...) {
        errors[id] = std::current_exception();
        next = chunks;
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace exlift::detail
