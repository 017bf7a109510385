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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tonelens/corpus.hpp"
#include "tonelens/gam.hpp"
#include "tonelens/pitch.hpp"
#include "tonelens/stats.hpp"
#include "tonelens/trajectory.hpp"

namespace tonelens {

// ---- analyze ----

enum class DiscardReason { kInsufficientVoicedPoints, kEmptyAfterGate, kLoadError, kTooShort };
std::string_view to_string(DiscardReason r);

struct DiscardRecord {
  std::string token_id;
  DiscardReason reason;
  std::string detail;
};

struct AnalyzeOptions {
  GateConfig gate;
  TrackerConfig tracker;
  int target_rate = kPipelineRate;
  std::optional<int> layer;  // keep only layer_tap tokens of this layer
};

/// Counts satisfy ingested == analyzed + discarded.
struct AnalysisRun {
  nlohmann::ordered_json config;
  std::string manifest_name;
  std::string manifest_sha256;
  std::size_t ingested = 0;
  std::size_t analyzed = 0;
  std::size_t discarded = 0;
  std::vector<DiscardRecord> discards;  // ordered by token_id
  std::string trajectories_file;

  nlohmann::ordered_json to_json() const;
};

struct AnalyzeResult {
  std::vector<NormalizedTrajectory> trajectories;  // manifest order
  AnalysisRun run;
};

/// load → resample → gate → track → normalize, tokens in parallel.
AnalyzeResult analyze_entries(const std::vector<ManifestEntry>& entries, const AnalyzeOptions& options);

/// Reads the manifest, analyzes every token and writes the trajectory CSV and
/// (when log_path is non-empty) the run log. Throws kZeroSuccess when no
/// token yields a trajectory.
AnalysisRun run_analyze(const std::filesystem::path& manifest, const std::filesystem::path& out_csv,
                        const std::filesystem::path& log_path, const AnalyzeOptions& options);

nlohmann::ordered_json analyze_config_json(const AnalyzeOptions& options);

namespace reference {
AnalyzeResult analyze_entries(const std::vector<ManifestEntry>& entries, const AnalyzeOptions& options);
}  // namespace reference

// ---- gam ----

enum class Grouping { kTone, kCIndex };
Grouping parse_grouping(std::string_view s);
std::string_view to_string(Grouping g);

struct GamRunOptions {
  Grouping group = Grouping::kCIndex;
  GamSpec spec;
  double trim_onset = 0.0;
};

struct GamRun {
  GamDesign design;
  GamFit fit;
  std::vector<TermTest> terms;
  std::size_t skipped_tokens = 0;  // tokens lacking the grouping field
};

/// Observations at t = k / 49 for every present point; missing points are
/// dropped row-wise.
std::vector<GamObservation> gam_observations(const std::vector<NormalizedTrajectory>& trajs,
                                             Grouping group, double trim_onset,
                                             std::size_t* skipped = nullptr);

GamRun run_gam(const std::vector<NormalizedTrajectory>& trajs, const GamRunOptions& options);
nlohmann::ordered_json gam_summary_json(const GamRun& run, const GamRunOptions& options);

// ---- correlate ----

nlohmann::ordered_json correlation_json(const CorrelationResult& result);

// ---- report ----

struct ReportInputs {
  std::vector<std::filesystem::path> trajectories;
  std::vector<std::filesystem::path> gam_summaries;
  std::vector<std::filesystem::path> correlations;
};

struct PlotSeries {
  std::string label;
  std::vector<std::optional<double>> points;
};

/// Fixed-precision SVG line plot; missing points break the polyline.
std::string render_svg(const std::string& title, const std::vector<PlotSeries>& series);

/// Shape checks on tone means after the onset trim.
struct ToneShapeChecks {
  bool t1_flattest = false;
  bool t4_falling = false;
  bool t2_rising = false;
  bool t3_dipping = false;
  std::vector<double> total_variation;  // per tone, T1..T4

  nlohmann::ordered_json to_json() const;
};
ToneShapeChecks tone_shape_checks(const std::vector<MeanTrajectory>& tone_means);

/// Writes one SVG per (trajectory file, model) and report_summary.json into
/// out_dir; returns the summary.
nlohmann::ordered_json run_report(const ReportInputs& inputs, const std::filesystem::path& out_dir);

/// Published anchor values carried in the summary for comparison only.
nlohmann::ordered_json reference_values_json();

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

}  // namespace tonelens
