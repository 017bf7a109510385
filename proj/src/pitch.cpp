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
#include <numbers>

#include "tonelens/error.hpp"
#include "tonelens/parallel.hpp"
#include "tonelens/pitch.hpp"

namespace tonelens {

std::size_t PitchTrack::voiced_count() const {
  return static_cast<std::size_t>(
      std::count_if(frames.begin(), frames.end(), [](const PitchFrame& f) { return f.voiced; }));
}

namespace {

// Per-clip constants shared by every frame.
class FrameAnalyzer {
 public:
  FrameAnalyzer(const AudioClip& clip, const TrackerConfig& cfg) : clip_(clip), cfg_(cfg) {
    const double fs = clip.sample_rate;
    if (!(cfg.floor > 0.0 && cfg.floor < cfg.ceil && cfg.ceil < fs / 2.0)) {
      throw Error(ErrorKind::kParameter, "need 0 < floor < ceil < sample_rate / 2");
    }
    if (!(cfg.time_step > 0.0 && cfg.window > 0.0)) {
      throw Error(ErrorKind::kParameter, "time step and window must be positive");
    }
    length_ = static_cast<std::size_t>(std::lround(cfg.window * fs));
    if (length_ < 4 || clip.samples.size() < length_) {
      throw Error(ErrorKind::kTooShort, "clip shorter than the analysis window");
    }

    min_lag_ = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(fs / cfg.ceil)));
    max_lag_ = std::min(static_cast<std::size_t>(std::ceil(fs / cfg.floor)), length_ - 2);
    if (min_lag_ >= max_lag_) throw Error(ErrorKind::kParameter, "window too short for pitch floor");

    window_.resize(length_);
    for (std::size_t n = 0; n < length_; ++n) {
      window_[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (n + 1.0) / (length_ + 1.0));
    }
    window_acf_ = autocorrelation(window_);

    double sq = 0.0;
    for (double s : clip.samples) sq += s * s;
    clip_rms_ = std::sqrt(sq / clip.samples.size());

    // Frame centers sit on multiples of the time step with the whole window inside the clip.
    const double half = 0.5 * length_ / fs;
    const double last = (clip.samples.size() - length_) / fs + half;
    for (long k = static_cast<long>(std::ceil(half / cfg.time_step - 1e-9));; ++k) {
      const double t = k * cfg.time_step;
      if (t > last + 1e-9) break;
      const long start = std::lround(t * fs) - static_cast<long>(length_ / 2);
      if (start < 0) continue;
      if (static_cast<std::size_t>(start) + length_ > clip.samples.size()) break;
      centers_.push_back(t);
      starts_.push_back(static_cast<std::size_t>(start));
    }
  }

  std::size_t frame_count() const { return centers_.size(); }

  PitchFrame analyze(std::size_t index) const {
    PitchFrame frame;
    frame.time = centers_[index];

    const double* x = clip_.samples.data() + starts_[index];
    double mean = 0.0;
    double sq = 0.0;
    for (std::size_t n = 0; n < length_; ++n) {
      mean += x[n];
      sq += x[n] * x[n];
    }
    mean /= length_;
    const double frame_rms = std::sqrt(sq / length_);

    std::vector<double> seg(length_);
    for (std::size_t n = 0; n < length_; ++n) seg[n] = (x[n] - mean) * window_[n];
    const std::vector<double> acf = autocorrelation(seg, max_lag_ + 1);
    if (!(acf[0] > 0.0)) return frame;

    // Highest local maximum of the r(0)-normalized autocorrelation.
    std::size_t best = 0;
    for (std::size_t lag = min_lag_; lag <= max_lag_; ++lag) {
      if (acf[lag] > acf[lag - 1] && acf[lag] >= acf[lag + 1] && (best == 0 || acf[lag] > acf[best])) {
        best = lag;
      }
    }
    if (best == 0 || acf[best] <= 0.0) return frame;

    auto corrected = [&](std::size_t lag) { return acf[lag] / window_acf_[lag]; };

    // Hill-climb to the nearby maximum of the window-corrected curve. The taper
    // bias grows with lag, so the search radius does too.
    std::size_t lag = best;
    const std::size_t radius = std::max<std::size_t>(3, best / 8);
    for (std::size_t step = 0; step < radius; ++step) {
      if (lag > min_lag_ && corrected(lag - 1) > corrected(lag)) {
        --lag;
      } else if (lag < max_lag_ && corrected(lag + 1) > corrected(lag)) {
        ++lag;
      } else {
        break;
      }
    }

    const double left = corrected(lag - 1);
    const double mid = corrected(lag);
    const double right = corrected(lag + 1);
    const double curvature = left - 2.0 * mid + right;
    double shift = 0.0;
    double peak = mid;
    if (curvature < 0.0) {
      shift = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
      peak = mid - 0.25 * (left - right) * shift;
    }

    frame.strength = std::clamp(peak, 0.0, 1.0);
    const double f0 = clip_.sample_rate / (lag + shift);
    const bool loud = frame_rms >= cfg_.silence_ratio * clip_rms_;
    if (loud && frame.strength >= cfg_.voicing_threshold && f0 >= cfg_.floor && f0 <= cfg_.ceil) {
      frame.voiced = true;
      frame.f0 = f0;
    }
    return frame;
  }

  PitchTrack make_track() const {
    PitchTrack track;
    track.floor = cfg_.floor;
    track.ceil = cfg_.ceil;
    track.token_id = clip_.token_id;
    track.frames.resize(frame_count());
    return track;
  }

 private:
  // r(τ) / r(0) for τ = 0..max_lag.
  static std::vector<double> autocorrelation(const std::vector<double>& v,
                                             std::size_t max_lag = std::size_t(-1)) {
    const std::size_t n = v.size();
    max_lag = std::min(max_lag, n - 1);
    std::vector<double> r(max_lag + 1, 0.0);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
      double s = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) s += v[i] * v[i + lag];
      r[lag] = s;
    }
    if (r[0] > 0.0) {
      const double r0 = r[0];
      for (double& value : r) value /= r0;
    }
    return r;
  }

  const AudioClip& clip_;
  TrackerConfig cfg_;
  std::size_t length_ = 0;
  std::size_t min_lag_ = 0;
  std::size_t max_lag_ = 0;
  double clip_rms_ = 0.0;
  std::vector<double> window_;
  std::vector<double> window_acf_;
  std::vector<double> centers_;
  std::vector<std::size_t> starts_;
};

}  // namespace

PitchTrack track_pitch(const AudioClip& clip, const TrackerConfig& cfg) {
  const FrameAnalyzer analyzer(clip, cfg);
  PitchTrack track = analyzer.make_track();
  const auto frames = static_cast<std::ptrdiff_t>(analyzer.frame_count());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < frames; ++i) {
    track.frames[i] = analyzer.analyze(static_cast<std::size_t>(i));
  }
  return track;
}

namespace reference {

PitchTrack track_pitch(const AudioClip& clip, const TrackerConfig& cfg) {
  const FrameAnalyzer analyzer(clip, cfg);
  PitchTrack track = analyzer.make_track();
  for (std::size_t i = 0; i < analyzer.frame_count(); ++i) track.frames[i] = analyzer.analyze(i);
  return track;
}

}  // namespace reference
}  // namespace tonelens
