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

#include <optional>
#include <span>
#include <vector>

#include "tonelens/trajectory.hpp"

namespace tonelens {

struct CorrelationResult {
  double r = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n = 0;
  double p = 1.0;
  std::size_t unmatched_keys = 0;
  std::optional<double> mean_token_r;  // per-token diagnostic, when requested
};

/// Pearson product-moment correlation, Fisher-z 95% interval
/// tanh(atanh r ± 1.96/√(n−3)) and two-sided t-test p on n − 2 df.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

struct PairingOptions {
  bool per_token_diagnostic = false;
};

/// Pools (a[k], b[k]) over every shared (token_id, c_index) key and every
/// point k present in both, then correlates the pooled pairs. Symmetric in
/// its arguments.
CorrelationResult trajectory_correlation(const std::vector<NormalizedTrajectory>& a,
                                         const std::vector<NormalizedTrajectory>& b,
                                         const PairingOptions& options = {});

namespace reference {
// Textbook single-pass-per-moment formula, kept as the test oracle.
double pearson_r(std::span<const double> x, std::span<const double> y);
}  // namespace reference

}  // namespace tonelens
