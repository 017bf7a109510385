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

#include "tonelens/error.hpp"
#include "tonelens/trajectory.hpp"

namespace tonelens {

std::size_t NormalizedTrajectory::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const auto& p) { return p.has_value(); }));
}

std::optional<NormalizedTrajectory> normalize_trajectory(const PitchTrack& track,
                                                         std::size_t n_points) {
  if (n_points < 2) throw Error(ErrorKind::kParameter, "need at least two trajectory points");

  std::vector<double> times;
  std::vector<double> values;
  for (const PitchFrame& f : track.frames) {
    if (f.voiced && f.f0) {
      times.push_back(f.time);
      values.push_back(*f.f0);
    }
  }
  if (times.size() < 2) return std::nullopt;

  const double t0 = times.front();
  const double span = times.back() - t0;
  std::vector<double> knots(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) knots[i] = (times[i] - t0) / span;
  knots.back() = 1.0;

  NormalizedTrajectory out;
  out.meta.token_id = track.token_id;
  out.points.resize(n_points);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n_points; ++k) {
    const double x = static_cast<double>(k) / (n_points - 1);
    while (seg + 2 < knots.size() && knots[seg + 1] < x) ++seg;
    const double u0 = knots[seg];
    const double u1 = knots[seg + 1];
    const double w = u1 > u0 ? std::clamp((x - u0) / (u1 - u0), 0.0, 1.0) : 0.0;
    const double f0 = values[seg] + w * (values[seg + 1] - values[seg]);
    if (f0 >= kF0Min && f0 <= kF0Max) out.points[k] = f0;
  }
  return out;
}

NormalizedTrajectory trim_onset(const NormalizedTrajectory& traj, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw Error(ErrorKind::kParameter, "onset trim fraction must be in [0, 1)");
  }
  NormalizedTrajectory out = traj;
  const auto n = static_cast<std::size_t>(std::ceil(fraction * out.points.size() - 1e-9));
  for (std::size_t i = 0; i < n && i < out.points.size(); ++i) out.points[i].reset();
  return out;
}

namespace group_by {

std::string tone(const TokenMeta& m) { return m.tone ? std::string(to_string(*m.tone)) : ""; }

std::string c_index(const TokenMeta& m) { return m.c_index ? std::to_string(*m.c_index) : ""; }

std::string model_and_c_index(const TokenMeta& m) {
  return m.model_id.value_or("") + "/" + c_index(m);
}

}  // namespace group_by

std::vector<MeanTrajectory> mean_trajectory(const std::vector<NormalizedTrajectory>& trajs,
                                            const GroupSelector& group) {
  if (trajs.empty()) throw Error(ErrorKind::kEmptyInput, "no trajectories to average");
  const std::size_t n = trajs.front().points.size();

  std::map<std::string, std::vector<std::vector<double>>> pooled;
  for (const auto& t : trajs) {
    if (t.points.size() != n) throw Error(ErrorKind::kValidation, "trajectory lengths differ");
    auto& columns = pooled[group(t.meta)];
    columns.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (t.points[i]) columns[i].push_back(*t.points[i]);
    }
  }

  std::vector<MeanTrajectory> out;
  for (auto& [key, columns] : pooled) {
    MeanTrajectory mean{key, std::vector<std::optional<double>>(n), std::vector<int>(n, 0)};
    for (std::size_t i = 0; i < n; ++i) {
      auto& v = columns[i];
      if (v.empty()) continue;
      std::sort(v.begin(), v.end());
      double s = 0.0;
      for (double x : v) s += x;
      mean.points[i] = s / v.size();
      mean.counts[i] = static_cast<int>(v.size());
    }
    out.push_back(std::move(mean));
  }
  return out;
}

}  // namespace tonelens
