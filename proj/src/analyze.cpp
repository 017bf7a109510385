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
#include <fstream>
#include <sstream>
#include <variant>

#include <openssl/evp.h>

#include "tonelens/error.hpp"
#include "tonelens/parallel.hpp"
#include "tonelens/report.hpp"

namespace tonelens {

using nlohmann::ordered_json;

std::string_view to_string(DiscardReason r) {
  switch (r) {
    case DiscardReason::kInsufficientVoicedPoints: return "insufficient_voiced_points";
    case DiscardReason::kEmptyAfterGate: return "empty_after_gate";
    case DiscardReason::kLoadError: return "load_error";
    case DiscardReason::kTooShort: return "too_short";
  }
  return "load_error";
}

ordered_json AnalysisRun::to_json() const {
  ordered_json j;
  j["config"] = config;
  j["manifest"] = {{"name", manifest_name}, {"sha256", manifest_sha256}};
  j["frame_time_basis"] = "gated";
  j["counts"] = {{"ingested", ingested}, {"analyzed", analyzed}, {"discarded", discarded}};
  ordered_json list = ordered_json::array();
  for (const auto& d : discards) {
    list.push_back({{"token_id", d.token_id}, {"reason", std::string(to_string(d.reason))},
                    {"detail", d.detail}});
  }
  j["discarded"] = std::move(list);
  j["outputs"] = {{"trajectories", trajectories_file}};
  return j;
}

ordered_json analyze_config_json(const AnalyzeOptions& o) {
  ordered_json j;
  j["gate_db"] = o.gate.threshold_db;
  j["gate_reference"] = o.gate.reference == GateReference::kPeak ? "peak" : "full_scale";
  j["floor_hz"] = o.tracker.floor;
  j["ceil_hz"] = o.tracker.ceil;
  j["time_step_s"] = o.tracker.time_step;
  j["window_s"] = o.tracker.window;
  j["voicing_threshold"] = o.tracker.voicing_threshold;
  j["silence_ratio"] = o.tracker.silence_ratio;
  j["sample_rate_hz"] = o.target_rate;
  j["trajectory_points"] = kTrajectoryPoints;
  j["f0_range_hz"] = {kF0Min, kF0Max};
  j["layer"] = o.layer ? ordered_json(*o.layer) : ordered_json(nullptr);
  return j;
}

namespace {

using TokenOutcome = std::variant<NormalizedTrajectory, DiscardRecord>;

TokenOutcome analyze_token(const ManifestEntry& entry, const AnalyzeOptions& options) {
  const std::string& id = entry.meta.token_id;
  AudioClip clip;
  try {
    clip = load_wav(entry.path);
  } catch (const Error& e) {
    // Logs name files only so they do not depend on where the corpus lives.
    std::string detail = e.what();
    const std::string full = entry.path.string();
    for (auto pos = detail.find(full); !full.empty() && pos != std::string::npos; pos = detail.find(full)) {
      detail.replace(pos, full.size(), entry.path.filename().string());
    }
    return DiscardRecord{id, DiscardReason::kLoadError, std::move(detail)};
  }
  clip.token_id = id;
  clip = resample(clip, options.target_rate);
  if (clip.samples.empty()) {
    return DiscardRecord{id, DiscardReason::kTooShort, "no samples after resampling"};
  }

  AudioClip gated = amplitude_gate(clip, options.gate);
  if (gated.samples.empty()) {
    return DiscardRecord{id, DiscardReason::kEmptyAfterGate, "no samples at or above the gate"};
  }

  PitchTrack track;
  try {
    // Frames inside one token run serially; tokens are the parallel unit.
    track = reference::track_pitch(gated, options.tracker);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kTooShort) throw;
    return DiscardRecord{id, DiscardReason::kTooShort, e.what()};
  }

  auto traj = normalize_trajectory(track);
  if (!traj) {
    return DiscardRecord{id, DiscardReason::kInsufficientVoicedPoints,
                         std::to_string(track.voiced_count()) + " voiced frame(s)"};
  }
  traj->meta = entry.meta;
  return std::move(*traj);
}

void validate_options(const AnalyzeOptions& options) {
  if (options.target_rate <= 0) throw Error(ErrorKind::kParameter, "sample rate must be positive");
  if (!(options.gate.threshold_db < 0.0)) throw Error(ErrorKind::kParameter, "gate must be < 0 dB");
  const auto& t = options.tracker;
  if (!(t.floor > 0.0 && t.floor < t.ceil && t.ceil < options.target_rate / 2.0)) {
    throw Error(ErrorKind::kParameter, "need 0 < floor < ceil < sample_rate / 2");
  }
  if (!(t.time_step > 0.0 && t.window > 0.0)) {
    throw Error(ErrorKind::kParameter, "time step and window must be positive");
  }
}

std::vector<const ManifestEntry*> select_entries(const std::vector<ManifestEntry>& entries,
                                                 const AnalyzeOptions& options) {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries) {
    if (options.layer && (e.meta.source != Source::kLayerTap || e.meta.layer_index != options.layer)) {
      continue;
    }
    out.push_back(&e);
  }
  return out;
}

AnalyzeResult collect(std::vector<TokenOutcome>& outcomes, const AnalyzeOptions& options) {
  AnalyzeResult result;
  result.run.config = analyze_config_json(options);
  result.run.ingested = outcomes.size();
  for (auto& o : outcomes) {
    if (auto* t = std::get_if<NormalizedTrajectory>(&o)) {
      result.trajectories.push_back(std::move(*t));
    } else {
      result.run.discards.push_back(std::move(std::get<DiscardRecord>(o)));
    }
  }
  std::stable_sort(result.run.discards.begin(), result.run.discards.end(),
                   [](const auto& a, const auto& b) { return a.token_id < b.token_id; });
  result.run.analyzed = result.trajectories.size();
  result.run.discarded = result.run.discards.size();
  return result;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace

AnalyzeResult analyze_entries(const std::vector<ManifestEntry>& entries, const AnalyzeOptions& options) {
  validate_options(options);
  const auto selected = select_entries(entries, options);
  std::vector<TokenOutcome> outcomes(selected.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(selected.size()); ++i) {
    outcomes[i] = analyze_token(*selected[i], options);
  }
  return collect(outcomes, options);
}

namespace reference {

AnalyzeResult analyze_entries(const std::vector<ManifestEntry>& entries, const AnalyzeOptions& options) {
  validate_options(options);
  const auto selected = select_entries(entries, options);
  std::vector<TokenOutcome> outcomes;
  for (const auto* e : selected) outcomes.push_back(analyze_token(*e, options));
  return collect(outcomes, options);
}

}  // namespace reference

AnalysisRun run_analyze(const std::filesystem::path& manifest, const std::filesystem::path& out_csv,
                        const std::filesystem::path& log_path, const AnalyzeOptions& options) {
  const auto entries = scan_manifest(manifest);
  AnalyzeResult result = analyze_entries(entries, options);

  std::ifstream in(manifest, std::ios::binary);
  std::stringstream bytes;
  bytes << in.rdbuf();
  result.run.manifest_name = manifest.filename().string();
  result.run.manifest_sha256 = sha256_hex(bytes.str());
  result.run.trajectories_file = out_csv.filename().string();

  if (!log_path.empty()) write_json(log_path, result.run.to_json());
  if (result.run.analyzed == 0) {
    throw Error(ErrorKind::kZeroSuccess, std::to_string(result.run.ingested) +
                                             " token(s) ingested, none produced a trajectory");
  }
  write_trajectory_csv(out_csv, result.trajectories);
  return result.run;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace tonelens
