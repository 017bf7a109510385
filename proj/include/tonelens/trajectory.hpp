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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tonelens/corpus.hpp"
#include "tonelens/pitch.hpp"

namespace tonelens {

inline constexpr std::size_t kTrajectoryPoints = 50;
inline constexpr double kF0Min = 60.0;
inline constexpr double kF0Max = 350.0;

/// F0 sampled at kTrajectoryPoints equally spaced relative times. Present
/// values lie in [kF0Min, kF0Max].
struct NormalizedTrajectory {
  std::vector<std::optional<double>> points;
  TokenMeta meta;

  std::size_t present_count() const;
};

struct MeanTrajectory {
  std::string group_key;
  std::vector<std::optional<double>> points;
  std::vector<int> counts;  // counts[i] == 0 exactly when points[i] is missing
};

/// Time-normalizes the voiced frames of a track. The first and last voiced
/// frames anchor relative time 0 and 1; values in between are linearly
/// interpolated and anything outside [60, 350] Hz becomes missing.
/// Returns nullopt (discard) when fewer than two frames are voiced.
std::optional<NormalizedTrajectory> normalize_trajectory(const PitchTrack& track,
                                                         std::size_t n_points = kTrajectoryPoints);

/// Marks the first ceil(fraction * n) points missing.
NormalizedTrajectory trim_onset(const NormalizedTrajectory& traj, double fraction = 0.2);

using GroupSelector = std::function<std::string(const TokenMeta&)>;

namespace group_by {
std::string tone(const TokenMeta& m);
std::string c_index(const TokenMeta& m);
std::string model_and_c_index(const TokenMeta& m);
}  // namespace group_by

/// Pointwise mean per group over present values, ordered by group key.
/// Values are summed in sorted order, so the result does not depend on the
/// order of the input set.
std::vector<MeanTrajectory> mean_trajectory(const std::vector<NormalizedTrajectory>& trajs,
                                            const GroupSelector& group);

// ---- trajectory CSV ----
//
// Header: token_id,source,model_id,c_index,tone,point_index,f0_hz
// One row per point; f0_hz is empty when missing.

inline constexpr const char* kTrajectoryCsvHeader =
    "token_id,source,model_id,c_index,tone,point_index,f0_hz";

std::string format_trajectory_csv(const std::vector<NormalizedTrajectory>& trajs);
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<NormalizedTrajectory>& trajs);

/// Parses the CSV back into trajectories in first-appearance order. Layer
/// index, speaker, sex and syllable are not part of the file and come back
/// empty. Throws Error{kSchema} naming the source on malformed input.
std::vector<NormalizedTrajectory> parse_trajectory_csv(std::string_view text,
                                                       const std::string& source_name);
std::vector<NormalizedTrajectory> read_trajectory_csv(const std::filesystem::path& path);

}  // namespace tonelens
