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
#include <iostream>

#include "CLI11.hpp"
#include "tonelens/error.hpp"
#include "tonelens/parallel.hpp"
#include "tonelens/report.hpp"

namespace {

constexpr int kExitFailure = 1;  // zero-success and other runtime failures
constexpr int kExitUsage = 2;

using namespace tonelens;

// Corpus directory: every .wav whose name follows the corpus convention.
std::vector<ManifestEntry> scan_wav_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ManifestEntry> entries;
  for (const auto& f : files) {
    try {
      entries.push_back({parse_corpus_filename(f.filename().string()), f});
    } catch (const Error& e) {
      std::cerr << "skipping " << f.filename().string() << ": " << e.what() << '\n';
    }
  }
  return entries;
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads();

  CLI::App app{"tonelens: F0 trajectory measurement, GAM fitting and layer correlation"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Measure normalized F0 trajectories for a corpus");
  std::filesystem::path manifest, wav_dir, traj_out = "trajectories.csv", log_out;
  AnalyzeOptions aopt;
  std::string gate_reference = "peak";
  int layer = 0;
  auto* src = analyze->add_option("--manifest", manifest, "JSON Lines token manifest");
  analyze->add_option("--wav-dir", wav_dir, "directory of <syllable><tone>_<F|M>V<n>.wav files")
      ->excludes(src);
  analyze->add_option("--out", traj_out, "trajectory CSV")->capture_default_str();
  analyze->add_option("--log", log_out, "run log JSON (default: <out>.log.json)");
  analyze->add_option("--gate-db", aopt.gate.threshold_db, "amplitude gate in dB")->capture_default_str();
  analyze->add_option("--gate-reference", gate_reference, "gate reference level")
      ->check(CLI::IsMember({"peak", "full-scale"}))
      ->capture_default_str();
  analyze->add_option("--floor", aopt.tracker.floor, "pitch floor (Hz)")->capture_default_str();
  analyze->add_option("--ceil", aopt.tracker.ceil, "pitch ceiling (Hz)")->capture_default_str();
  analyze->add_option("--time-step", aopt.tracker.time_step, "frame step (s)")->capture_default_str();
  analyze->add_option("--window", aopt.tracker.window, "analysis window (s)")->capture_default_str();
  analyze->add_option("--voicing-threshold", aopt.tracker.voicing_threshold)->capture_default_str();
  analyze->add_option("--sample-rate", aopt.target_rate, "pipeline rate (Hz)")->capture_default_str();
  analyze->add_option("--layer", layer, "keep only layer_tap tokens of this layer")
      ->check(CLI::IsMember({2, 3, 4}));

  // gam
  auto* gam = app.add_subcommand("gam", "Fit f0 ~ group + s(time, by = group)");
  std::filesystem::path gam_traj, gam_out = "gam_summary.json";
  std::string group = "c_index";
  GamRunOptions gopt;
  double lambda_min = 1e-4, lambda_max = 1e6;
  int lambda_steps = 41;
  gam->add_option("--traj", gam_traj, "trajectory CSV")->required();
  gam->add_option("--group", group)->check(CLI::IsMember({"tone", "c_index"}))->capture_default_str();
  gam->add_option("--basis-dim", gopt.spec.basis_dim)->capture_default_str();
  gam->add_option("--lambda-min", lambda_min)->capture_default_str();
  gam->add_option("--lambda-max", lambda_max)->capture_default_str();
  gam->add_option("--lambda-steps", lambda_steps)->capture_default_str();
  gam->add_option("--trim-onset", gopt.trim_onset, "fraction of leading points to drop")
      ->capture_default_str();
  gam->add_option("--out", gam_out)->capture_default_str();

  // correlate
  auto* correlate = app.add_subcommand("correlate", "Pooled Pearson correlation of two trajectory sets");
  std::filesystem::path corr_a, corr_b, corr_out = "correlations.json";
  PairingOptions popt;
  correlate->add_option("--a", corr_a, "trajectory CSV (e.g. layer taps)")->required();
  correlate->add_option("--b", corr_b, "trajectory CSV (e.g. outputs)")->required();
  correlate->add_option("--out", corr_out)->capture_default_str();
  correlate->add_flag("--per-token", popt.per_token_diagnostic, "also report the mean per-token r");

  // report
  auto* report = app.add_subcommand("report", "Plots and summary across artifacts");
  ReportInputs rin;
  std::filesystem::path report_dir = "report";
  report->add_option("--traj", rin.trajectories, "trajectory CSV(s)");
  report->add_option("--gam", rin.gam_summaries, "gam summary JSON(s)");
  report->add_option("--corr", rin.correlations, "correlation JSON(s)");
  report->add_option("--out-dir", report_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*analyze) {
      if (manifest.empty() && wav_dir.empty()) {
        std::cerr << "analyze: one of --manifest or --wav-dir is required\n";
        return kExitUsage;
      }
      aopt.gate.reference = gate_reference == "peak" ? GateReference::kPeak : GateReference::kFullScale;
      if (layer != 0) aopt.layer = layer;
      if (log_out.empty()) log_out = traj_out.string() + ".log.json";
      AnalysisRun run;
      if (!manifest.empty()) {
        run = run_analyze(manifest, traj_out, log_out, aopt);
      } else {
        auto result = analyze_entries(scan_wav_dir(wav_dir), aopt);
        result.run.manifest_name = wav_dir.filename().string();
        result.run.trajectories_file = traj_out.filename().string();
        write_json(log_out, result.run.to_json());
        if (result.run.analyzed == 0) throw Error(ErrorKind::kZeroSuccess, "no token produced a trajectory");
        write_trajectory_csv(traj_out, result.trajectories);
        run = result.run;
      }
      std::cout << "ingested " << run.ingested << ", analyzed " << run.analyzed << ", discarded "
                << run.discarded << '\n';
    } else if (*gam) {
      gopt.group = parse_grouping(group);
      gopt.spec.lambda_grid = geometric_grid(lambda_min, lambda_max, lambda_steps);
      const auto run = run_gam(read_trajectory_csv(gam_traj), gopt);
      write_json(gam_out, gam_summary_json(run, gopt));
      std::cout << "lambda " << run.fit.lambda << ", edf " << run.fit.edf << ", adjusted R2 "
                << (run.fit.adjusted_r2 ? std::to_string(*run.fit.adjusted_r2) : "undefined") << '\n';
    } else if (*correlate) {
      const auto res = trajectory_correlation(read_trajectory_csv(corr_a), read_trajectory_csv(corr_b), popt);
      write_json(corr_out, correlation_json(res));
      std::cout << "r " << res.r << " [" << res.ci_low << ", " << res.ci_high << "], n " << res.n << '\n';
    } else if (*report) {
      run_report(rin, report_dir);
      std::cout << "report written to " << report_dir.string() << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "tonelens: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::kParameter:
      case ErrorKind::kEmptyInput:
        return kExitUsage;
      default:
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "tonelens: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
