/*
 * Copyright 2026 The Uplift Policy Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef UPLIFT_PARALLEL_H_
#define UPLIFT_PARALLEL_H_

#include <cstdint>
#include <exception>
#include <mutex>

#include <omp.h>

namespace uplift {

// Runs fn(i) for i in [0, n). With jobs <= 1 the loop is plain sequential
// code. Each iteration must write to its own output slot; callers derive any
// randomness from the iteration index so results match the serial order.
template <typename Fn>
void ParallelFor(int64_t n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  // Exceptions cannot cross the OpenMP region; the first one is rethrown.
  std::exception_ptr failure;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (int64_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

inline int HardwareJobs() { return omp_get_max_threads(); }

}  // namespace uplift

#endif  // UPLIFT_PARALLEL_H_
