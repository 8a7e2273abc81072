#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace metastab {

// Batch drivers may fan work out over (member, epsilon, sampling) style index
// ranges, but results must be assembled in canonical index order so output is
// schedule-independent. parallel_for guarantees that shape: body(i) runs once
// per i and may only write to slot i of a pre-sized output; the fold over the
// output happens on the caller side, in index order.
struct run_options {
  unsigned threads = 1;
};

template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads > 64) threads = 64;
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  if (threads > n) threads = static_cast<unsigned>(n);

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t]() {
      try {
        for (std::size_t i = t; i < n; i += threads) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace metastab
