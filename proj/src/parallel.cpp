// Copyright 2026 The tonelens Authors. All Rights Reserved.
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

#include "tonelens/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>
#include <vector>

namespace tonelens {

namespace {
constexpr std::size_t kSumChunk = 4096;
}

int thread_count() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("TONELENS_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap > 0) n = std::min(n, cap);
    } catch (const std::exception&) {
      // ignored: a malformed cap leaves the runtime default
    }
  }
  return std::max(n, 1);
}

void configure_threads() { omp_set_num_threads(thread_count()); }

double deterministic_sum(std::span<const double> values) {
  const std::size_t chunks = (values.size() + kSumChunk - 1) / kSumChunk;
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kSumChunk;
    const std::size_t end = std::min(values.size(), begin + kSumChunk);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += values[i];
    partial[c] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

namespace reference {

double serial_sum(std::span<const double> values) {
  double total = 0.0;
  for (std::size_t begin = 0; begin < values.size(); begin += kSumChunk) {
    const std::size_t end = std::min(values.size(), begin + kSumChunk);
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += values[i];
    total += s;
  }
  return total;
}

}  // namespace reference
}  // namespace tonelens
