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

#pragma once

#include <cstddef>
#include <span>

namespace tonelens {

// Thread count for OpenMP regions: omp_get_max_threads() capped by the
// TONELENS_THREADS environment variable when it holds a positive integer.
int thread_count();

// Applies thread_count() to the OpenMP runtime. Called once by the CLI.
void configure_threads();

// Sum over fixed-size chunks merged in chunk order, so the result does not
// depend on how many threads ran.
double deterministic_sum(std::span<const double> values);

namespace reference {
double serial_sum(std::span<const double> values);
}  // namespace reference

}  // namespace tonelens
