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
#include <string>
#include <vector>

#include "tonelens/corpus.hpp"

namespace tonelens {

enum class GateReference {
  kPeak,       // threshold relative to the clip's own peak |sample|
  kFullScale,  // threshold relative to 1.0
};

struct GateConfig {
  double threshold_db = -30.0;
  GateReference reference = GateReference::kPeak;
};

/// Absolute amplitude below which samples are dropped.
double gate_threshold(const AudioClip& clip, const GateConfig& cfg);

/// Keeps exactly the samples with |s| >= threshold, in order. The removed
/// stretches are deleted rather than zeroed, so downstream frame times index
/// gated time. A clip whose peak is 0 comes back empty.
AudioClip amplitude_gate(const AudioClip& clip, const GateConfig& cfg);
AudioClip apply_threshold(const AudioClip& clip, double threshold);

struct PitchFrame {
  double time = 0.0;  // seconds, frame center
  std::optional<double> f0;
  bool voiced = false;
  double strength = 0.0;  // normalized autocorrelation peak, clamped to [0, 1]
};

struct PitchTrack {
  std::vector<PitchFrame> frames;
  double floor = 60.0;
  double ceil = 350.0;
  std::string token_id;

  std::size_t voiced_count() const;
};

struct TrackerConfig {
  double floor = 60.0;
  double ceil = 350.0;
  double time_step = 0.01;
  double window = 0.04;
  double voicing_threshold = 0.45;
  double silence_ratio = 0.01;  // frame RMS must reach this fraction of clip RMS
};

/// Short-time autocorrelation F0 tracker.
///
/// Each frame is mean-removed and Hann-windowed. The candidate lag is the
/// highest local maximum of the r(0)-normalized autocorrelation inside
/// [1/ceil, 1/floor]; decaying overlap makes that pick prefer the
/// fundamental over its multiples. The peak is then located on the
/// window-corrected autocorrelation r_a(τ)/r_w(τ) with parabolic
/// interpolation, and that corrected value is the frame's strength.
///
/// Frames are evaluated in parallel; output is identical to
/// reference::track_pitch for any thread count.
PitchTrack track_pitch(const AudioClip& clip, const TrackerConfig& cfg = {});

namespace reference {
PitchTrack track_pitch(const AudioClip& clip, const TrackerConfig& cfg = {});
}  // namespace reference

}  // namespace tonelens
