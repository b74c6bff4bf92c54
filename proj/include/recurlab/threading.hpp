// Copyright 2026 The recurlab Authors.

// Licensed under the Apache License, Version 2.0 (the License);
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

// http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an AS IS BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace recurlab {

/// Worker count: RECURLAB_THREADS if set, else hardware concurrency.
int max_threads();

/// Run fn(chunk_index) for chunk_index in [0, n_chunks). The chunk
/// decomposition is fixed by the caller, never by the worker count, so
/// per-chunk seeded results merge identically at any thread setting.
void parallel_chunks(std::size_t n_chunks,
                     const std::function<void(std::size_t)> &fn);

} // namespace recurlab
