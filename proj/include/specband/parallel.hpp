// Copyright 2026 The specband Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPECBAND_PARALLEL_HPP
#define SPECBAND_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace specband {

/// Worker count: SPECBAND_THREADS if set and positive, else hardware
/// concurrency (at least 1).
inline std::size_t default_thread_count() {
  if (const char* env = std::getenv("SPECBAND_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Worker count for an explicit request: 0 means the default; a positive
/// SPECBAND_THREADS caps any request.
inline std::size_t resolve_thread_count(std::size_t requested) {
  if (requested == 0) return default_thread_count();
  if (const char* env = std::getenv("SPECBAND_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0 && static_cast<std::size_t>(v) < requested) return static_cast<std::size_t>(v);
  }
  return requested;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Jobs are claimed
/// from a shared counter, so fn must only write to per-index state. The first
/// exception thrown by any job is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count = threads < n ? threads : n;
  pool.reserve(count);
  for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace specband

#endif  // SPECBAND_PARALLEL_HPP
