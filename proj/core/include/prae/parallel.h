// Copyright 2026 The prae Authors
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

#ifndef PRAE_PARALLEL_H_
#define PRAE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace prae {

// Worker cap: PRAE_THREADS if set and positive, else hardware concurrency.
std::size_t thread_limit();

// Runs fn(i) for i in [0, count) on up to min(max_threads, thread_limit())
// threads (max_threads = 0: no extra cap). The first
// exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  std::size_t max_threads = 0);

}  // namespace prae

#endif  // PRAE_PARALLEL_H_
