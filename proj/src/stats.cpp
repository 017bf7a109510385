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

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "tonelens/error.hpp"
#include "tonelens/parallel.hpp"
#include "tonelens/stats.hpp"

namespace tonelens {

namespace {
constexpr double kZ975 = 1.96;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::kParameter, "pearson inputs differ in length");
  const std::size_t n = x.size();
  if (n < 4) throw Error(ErrorKind::kInsufficientData, "pearson needs n >= 4");

  const double mx = deterministic_sum(x) / n;
  const double my = deterministic_sum(y) / n;
  std::vector<double> dxx(n), dyy(n), dxy(n);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    dxx[i] = dx * dx;
    dyy[i] = dy * dy;
    dxy[i] = dx * dy;
  }
  const double sxx = deterministic_sum(dxx);
  const double syy = deterministic_sum(dyy);
  const double sxy = deterministic_sum(dxy);
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    throw Error(ErrorKind::kUndefinedCorrelation, "zero variance input");
  }

  CorrelationResult res;
  res.n = n;
  res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::abs(res.r) == 1.0) {
    res.ci_low = res.ci_high = res.r;
    res.p = 0.0;
    return res;
  }
  const double z = std::atanh(res.r);
  const double half = kZ975 / std::sqrt(static_cast<double>(n) - 3.0);
  res.ci_low = std::tanh(z - half);
  res.ci_high = std::tanh(z + half);
  const double dof = static_cast<double>(n) - 2.0;
  const double t = res.r * std::sqrt(dof / (1.0 - res.r * res.r));
  const boost::math::students_t dist(dof);
  res.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return res;
}

CorrelationResult trajectory_correlation(const std::vector<NormalizedTrajectory>& a,
                                         const std::vector<NormalizedTrajectory>& b,
                                         const PairingOptions& options) {
  using Key = std::pair<std::string, int>;
  auto index = [](const std::vector<NormalizedTrajectory>& set, const char* side) {
    std::map<Key, const NormalizedTrajectory*> m;
    for (const auto& t : set) {
      Key key{t.meta.token_id, t.meta.c_index.value_or(-1)};
      if (!m.emplace(key, &t).second) {
        throw Error(ErrorKind::kValidation,
                    std::string("duplicate key '") + t.meta.token_id + "' in " + side);
      }
    }
    return m;
  };
  const auto ia = index(a, "first set");
  const auto ib = index(b, "second set");

  // Ordered by key, so pair order (and every sum) is fixed regardless of
  // argument order.
  std::vector<double> xa, xb;
  std::vector<double> token_rs;
  std::size_t shared = 0;
  for (const auto& [key, ta] : ia) {
    auto it = ib.find(key);
    if (it == ib.end()) continue;
    ++shared;
    const auto& tb = *it->second;
    const std::size_t n = std::min(ta->points.size(), tb.points.size());
    std::vector<double> pa, pb;
    for (std::size_t k = 0; k < n; ++k) {
      if (ta->points[k] && tb.points[k]) {
        pa.push_back(*ta->points[k]);
        pb.push_back(*tb.points[k]);
      }
    }
    if (options.per_token_diagnostic) {
      try {
        token_rs.push_back(pearson(pa, pb).r);
      } catch (const Error&) {
        // too few points or flat token: excluded from the diagnostic
      }
    }
    xa.insert(xa.end(), pa.begin(), pa.end());
    xb.insert(xb.end(), pb.begin(), pb.end());
  }
  if (shared == 0) throw Error(ErrorKind::kEmptyPairing, "no shared (token_id, c_index) keys");

  CorrelationResult res = pearson(xa, xb);
  res.unmatched_keys = (ia.size() - shared) + (ib.size() - shared);
  if (options.per_token_diagnostic && !token_rs.empty()) {
    res.mean_token_r = reference::serial_sum(token_rs) / token_rs.size();
  }
  return res;
}

namespace reference {

double pearson_r(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace reference
}  // namespace tonelens
