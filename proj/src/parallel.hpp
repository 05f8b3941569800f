// Copyright 2026 The TheftSentry Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace theftsentry {

/// 0 means "one worker per hardware thread".
inline unsigned resolve_threads(unsigned requested) noexcept {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(begin, end, worker) over [0, count) in chunks handed out
/// dynamically to `threads` workers. Callers that need bit-stable results must
/// make each chunk's contribution independent of which worker ran it.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, std::size_t chunk,
                  Body&& body) {
  if (count == 0) return;
  chunk = std::max<std::size_t>(chunk, 1);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(
      resolve_threads(threads), (count + chunk - 1) / chunk));
  if (workers <= 1) {
    for (std::size_t begin = 0; begin < count; begin += chunk)
      body(begin, std::min(count, begin + chunk), 0u);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&](unsigned worker) {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= count) break;
        body(begin, std::min(count, begin + chunk), worker);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(count);
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Number of workers parallel_for will actually use.
inline unsigned worker_count(std::size_t count, unsigned threads,
                             std::size_t chunk) noexcept {
  chunk = std::max<std::size_t>(chunk, 1);
  return static_cast<unsigned>(std::max<std::size_t>(
      1, std::min<std::size_t>(resolve_threads(threads),
                               (count + chunk - 1) / chunk)));
}

}  // namespace theftsentry
