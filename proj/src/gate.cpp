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

#include "tonelens/error.hpp"
#include "tonelens/pitch.hpp"

namespace tonelens {

double gate_threshold(const AudioClip& clip, const GateConfig& cfg) {
  if (!(cfg.threshold_db < 0.0)) throw Error(ErrorKind::kParameter, "gate threshold must be < 0 dB");
  const double ratio = std::pow(10.0, cfg.threshold_db / 20.0);
  if (cfg.reference == GateReference::kFullScale) return ratio;
  double peak = 0.0;
  for (double s : clip.samples) peak = std::max(peak, std::abs(s));
  return peak * ratio;
}

AudioClip apply_threshold(const AudioClip& clip, double threshold) {
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.token_id = clip.token_id;
  // A zero threshold would keep silence; a silent clip has nothing to keep.
  if (threshold <= 0.0) return out;
  out.samples.reserve(clip.samples.size());
  std::copy_if(clip.samples.begin(), clip.samples.end(), std::back_inserter(out.samples),
               [threshold](double s) { return std::abs(s) >= threshold; });
  return out;
}

AudioClip amplitude_gate(const AudioClip& clip, const GateConfig& cfg) {
  if (clip.samples.empty()) throw Error(ErrorKind::kEmptyAudio, "cannot gate an empty clip");
  return apply_threshold(clip, gate_threshold(clip, cfg));
}

}  // namespace tonelens
