// Copyright 2026 The ptrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "ptrack/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>

namespace ptrack {

namespace {
std::atomic<int> g_workers{0};
}  // namespace

int worker_count() {
  const int w = g_workers.load();
  return w > 0 ? w : std::max(1, omp_get_max_threads());
}

void set_worker_count(int workers) { g_workers.store(std::max(0, workers)); }

}  // namespace ptrack
