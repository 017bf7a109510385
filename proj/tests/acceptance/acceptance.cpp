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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any selected criterion fails.
//
//   tonelens_acceptance [--criterion NAME]... [--cli PATH] [--list]
//
// Natural-speech corpus: set TONELENS_NATURAL_MANIFEST to a manifest of
// natural tokens to run the corpus-anchored criterion against real data.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>

#include <fmt/core.h>

#include "../support.hpp"
#include "CLI11.hpp"
#include "tonelens/error.hpp"
#include "tonelens/parallel.hpp"
#include "tonelens/pitch.hpp"
#include "tonelens/report.hpp"
#include "tonelens/stats.hpp"
#include "tonelens/trajectory.hpp"

using namespace tonelens;
using namespace tonelens::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// ---- pinned tolerances ----
constexpr double kSineToleranceHz = 1.0;
constexpr double kChirpToleranceHz = 3.0;
constexpr double kPitchRuntimeS = 1.0;
constexpr int kNormalizationCases = 1000;
constexpr double kOlsRelTol = 1e-8;
constexpr int kOlsSystems = 100;
constexpr double kCurveRmseHz = 3.0;
constexpr double kTermAlpha = 0.001;
constexpr double kAdjR2Tol = 0.05;
constexpr double kGamRuntimeS = 30.0;
constexpr double kSynthSigmaHz = 5.0;
constexpr int kSynthTokens = 100;
constexpr double kHandRTol = 1e-12;
constexpr double kClosedFormTol = 1e-10;
constexpr double kAffineTol = 1e-12;
constexpr int kAffineCases = 1000;
constexpr double kNaturalAdjR2 = 0.267;
constexpr double kNaturalAdjR2Tol = 0.05;
constexpr double kNaturalTrim = 0.2;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, std::string what) {
    if (!ok) {
      pass = false;
      notes.push_back(std::move(what));
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Frames whose window lies fully inside the tone, away from both ends.
bool interior(const PitchFrame& f, double duration, double window) {
  return f.time - window >= 0.0 && f.time + window <= duration;
}

// ---- pitch ----

Outcome pitch_accuracy() {
  Outcome o;
  const TrackerConfig cfg;

  auto t0 = Clock::now();
  const auto sine_clip = sine(220.0, 0.5);
  const auto sine_track = track_pitch(sine_clip, cfg);
  const double sine_time = seconds_since(t0);
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& f : sine_track.frames) {
    if (!interior(f, sine_clip.duration(), cfg.window)) continue;
    ++checked;
    if (!f.voiced) {
      o.require(false, fmt::format("sine frame at {:.3f}s unvoiced", f.time));
      continue;
    }
    worst = std::max(worst, std::abs(*f.f0 - 220.0));
  }
  o.require(checked > 0, "no interior sine frames");
  o.require(worst <= kSineToleranceHz, fmt::format("sine max error {:.4f} Hz", worst));

  // Linear chirp 100 -> 300 Hz over 1 s; instantaneous frequency 100 + 200 t.
  t0 = Clock::now();
  const auto chirp_clip = chirp(100.0, 300.0, 1.0);
  const auto chirp_track = track_pitch(chirp_clip, cfg);
  const double chirp_time = seconds_since(t0);
  double chirp_worst = 0.0;
  checked = 0;
  for (const auto& f : chirp_track.frames) {
    if (!interior(f, chirp_clip.duration(), cfg.window)) continue;
    ++checked;
    if (!f.voiced) {
      o.require(false, fmt::format("chirp frame at {:.3f}s unvoiced", f.time));
      continue;
    }
    chirp_worst = std::max(chirp_worst, std::abs(*f.f0 - (100.0 + 200.0 * f.time)));
  }
  o.require(checked > 0, "no interior chirp frames");
  o.require(chirp_worst <= kChirpToleranceHz, fmt::format("chirp max error {:.4f} Hz", chirp_worst));
  o.require(sine_time < kPitchRuntimeS && chirp_time < kPitchRuntimeS,
            fmt::format("runtime {:.3f}s / {:.3f}s", sine_time, chirp_time));
  o.notes.push_back(fmt::format("sine err {:.4f} Hz, chirp err {:.4f} Hz, {:.3f}s", worst, chirp_worst,
                                std::max(sine_time, chirp_time)));
  return o;
}

// ---- gate ----

Outcome gate_exactness() {
  Outcome o;
  std::mt19937_64 gen(2024);
  const double ratio = std::pow(10.0, -30.0 / 20.0);
  int patterns = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 16 + gen() % 2000;
    // Distinct magnitudes so that the retained values identify their indices.
    std::vector<double> mags(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& m : mags) m = u(gen);
    // A unique peak fixes the threshold; then plant values exactly at
    // and one ulp either side of it.
    const double scale = 0.05 + u(gen);
    const double thr = scale * ratio;
    mags[0] = scale;
    mags[1] = thr;
    mags[2] = std::nextafter(thr, 0.0);
    mags[3] = std::nextafter(thr, 1.0);
    for (std::size_t i = 4; i < n; ++i) mags[i] *= scale;
    std::sort(mags.begin(), mags.end());
    mags.erase(std::unique(mags.begin(), mags.end()), mags.end());
    std::shuffle(mags.begin(), mags.end(), gen);
    AudioClip clip;
    clip.sample_rate = 16000;
    for (std::size_t i = 0; i < mags.size(); ++i) clip.samples.push_back(gen() % 2 ? mags[i] : -mags[i]);

    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
      if (std::abs(clip.samples[i]) >= thr) expected.push_back(i);
    }
    std::map<double, std::size_t> index_of;
    for (std::size_t i = 0; i < clip.samples.size(); ++i) index_of[clip.samples[i]] = i;
    const auto gated = amplitude_gate(clip, GateConfig{-30.0, GateReference::kPeak});
    std::vector<std::size_t> got;
    for (double s : gated.samples) got.push_back(index_of.at(s));
    if (got != expected) {
      o.require(false, fmt::format("pattern {} retained set differs", trial));
      break;
    }
    ++patterns;
  }
  o.notes.push_back(fmt::format("{} patterns", patterns));
  return o;
}

// ---- normalization ----

Outcome normalization_contract() {
  Outcome o;
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int discarded = 0, emitted = 0;
  for (int trial = 0; trial < kNormalizationCases; ++trial) {
    PitchTrack track;
    track.floor = 30.0;
    track.ceil = 500.0;
    const int frames = static_cast<int>(gen() % 60);
    const double q = u(gen);
    for (int i = 0; i < frames; ++i) {
      PitchFrame f;
      f.time = 0.02 + 0.01 * i;
      if (u(gen) < q) {
        f.voiced = true;
        f.f0 = 30.0 + 470.0 * u(gen);  // deliberately wider than [60, 350]
        f.strength = 0.9;
      }
      track.frames.push_back(f);
    }
    const auto t = normalize_trajectory(track);
    if (track.voiced_count() < 2) {
      o.require(!t.has_value(), fmt::format("case {} with < 2 voiced frames was kept", trial));
      ++discarded;
      continue;
    }
    if (!t) {
      o.require(false, fmt::format("case {} dropped", trial));
      continue;
    }
    ++emitted;
    o.require(t->points.size() == static_cast<std::size_t>(kTrajectoryPoints), "point count");
    for (const auto& p : t->points) {
      if (p && (*p < kF0Min || *p > kF0Max)) {
        o.require(false, fmt::format("case {} value {} out of range", trial, *p));
        break;
      }
    }
  }

  // A token that yields a single voiced frame is discarded with its reason code.
  TempDir dir("accept_norm");
  write_wav(dir / "one.wav", sine(220, 0.045));
  ManifestEntry e;
  e.path = dir / "one.wav";
  e.meta.token_id = "one";
  e.meta.source = Source::kGenerated;
  e.meta.c_index = 0;
  const auto res = analyze_entries({e}, {});
  o.require(res.run.discards.size() == 1 &&
                res.run.discards[0].reason == DiscardReason::kInsufficientVoicedPoints,
            "one-frame token not discarded as insufficient_voiced_points");
  o.notes.push_back(fmt::format("{} cases, {} emitted, {} discarded", kNormalizationCases, emitted, discarded));
  return o;
}

// ---- GAM ----

Eigen::VectorXd ols_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const auto p = X.cols();
  Eigen::MatrixXd a(p, p + 1);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = X.col(i).dot(X.col(j));
    a(i, p) = X.col(i).dot(y);
  }
  for (Eigen::Index c = 0; c < p; ++c) {
    Eigen::Index piv = c;
    for (Eigen::Index r = c + 1; r < p; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    }
    a.row(c).swap(a.row(piv));
    for (Eigen::Index r = c + 1; r < p; ++r) a.row(r) -= a(r, c) / a(c, c) * a.row(c);
  }
  Eigen::VectorXd beta(p);
  for (Eigen::Index c = p - 1; c >= 0; --c) {
    double s = a(c, p);
    for (Eigen::Index j = c + 1; j < p; ++j) s -= a(c, j) * beta(j);
    beta(c) = s / a(c, c);
  }
  return beta;
}

// Synthetic four-category fit: curve RMSE, term significance and adjusted R².
void synthetic_gam_checks(Outcome& o) {
  const auto t0 = Clock::now();
  const auto obs = synthetic_corpus(1, kSynthTokens, kSynthSigmaHz);
  const auto design = build_design(obs, GamSpec{}, {"flat", "rising", "dipping", "falling"});
  const auto fit = select_lambda(design);
  const auto terms = term_significance(fit, design);
  const double elapsed = seconds_since(t0);

  for (int c = 0; c < 4; ++c) {
    double sq = 0.0;
    for (int k = 0; k < kTrajectoryPoints; ++k) {
      const double t = k / 49.0;
      const double d = predict(design, fit, c, t) - synthetic_curve(c, t);
      sq += d * d;
    }
    const double rmse = std::sqrt(sq / kTrajectoryPoints);
    o.require(rmse < kCurveRmseHz, fmt::format("category {} RMSE {:.3f} Hz", c, rmse));
  }
  for (const auto& t : terms) {
    o.require(t.testable && t.p < kTermAlpha, fmt::format("term {} p = {:.3g}", t.name, t.p));
  }
  const double mean = design.y.mean();
  const double var = (design.y.array() - mean).square().sum() / static_cast<double>(design.y.size() - 1);
  const double oracle = 1.0 - kSynthSigmaHz * kSynthSigmaHz / var;
  o.require(fit.adjusted_r2 && std::abs(*fit.adjusted_r2 - oracle) <= kAdjR2Tol,
            fmt::format("adjusted R2 {:.4f} vs oracle {:.4f}", fit.adjusted_r2.value_or(NAN), oracle));
  o.require(elapsed < kGamRuntimeS, fmt::format("runtime {:.2f}s", elapsed));
  o.notes.push_back(fmt::format("lambda {:.3g}, edf {:.2f}, adj R2 {:.4f} (oracle {:.4f}), {:.2f}s", fit.lambda,
                                fit.edf, fit.adjusted_r2.value_or(NAN), oracle, elapsed));
}

Outcome gam_correctness() {
  Outcome o;
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  for (int trial = 0; trial < kOlsSystems; ++trial) {
    const Eigen::Index n = 30 + static_cast<Eigen::Index>(gen() % 100);
    const Eigen::Index p = 2 + static_cast<Eigen::Index>(gen() % 20);
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      X(r, 0) = 1.0;
      for (Eigen::Index c = 1; c < p; ++c) X(r, c) = n01(gen);
      y(r) = 200 + 50 * n01(gen);
    }
    const std::vector<PenaltyBlock> pens{{1, Eigen::MatrixXd::Identity(p - 1, p - 1)}};
    const auto fit = fit_penalized(X, y, pens, 0.0);
    const Eigen::VectorXd expect = X * ols_oracle(X, y);
    worst = std::max(worst, (X * fit.coefficients - expect).norm() / expect.norm());
  }
  o.require(worst <= kOlsRelTol, fmt::format("OLS relative error {:.3g}", worst));

  // GCV argmin against exhaustive re-evaluation.
  const auto design = build_design(synthetic_corpus(2, 20, kSynthSigmaHz), GamSpec{});
  const auto selected = select_lambda(design);
  const PenalizedSystem system(design.X, design.y, design.penalties, design.null_directions);
  double best = std::numeric_limits<double>::infinity(), best_lambda = 0.0;
  for (double lambda : design.spec.lambda_grid) {
    const double g = system.gcv(lambda);
    if (g <= best) {
      best = g;
      best_lambda = lambda;
    }
  }
  o.require(selected.lambda == best_lambda, "GCV argmin differs from exhaustive grid");

  synthetic_gam_checks(o);
  o.notes.push_back(fmt::format("OLS worst rel err {:.2g}", worst));
  return o;
}

// ---- correlation ----

Outcome correlation_machinery() {
  Outcome o;
  const std::vector<double> x{1, 2, 3, 4}, y{2, 1, 4, 3};
  const auto hand = pearson(x, y);
  o.require(std::abs(hand.r - 0.6) <= kHandRTol, fmt::format("r = {:.17g}", hand.r));
  const double z = std::atanh(0.6);
  o.require(std::abs(hand.ci_low - std::tanh(z - 1.96)) <= kClosedFormTol &&
                std::abs(hand.ci_high - std::tanh(z + 1.96)) <= kClosedFormTol,
            "Fisher CI");
  const double t2 = 0.6 * std::sqrt(2.0 / (1.0 - 0.36));
  o.require(std::abs(hand.p - (1.0 - t2 / std::sqrt(t2 * t2 + 2.0))) <= kClosedFormTol, "p (2 df)");

  // Four degrees of freedom: p = 1 - sin(th) (1 + cos(th)^2 / 2), th = atan(|t| / 2).
  const std::vector<double> x6{1, 2, 3, 4, 5, 6}, y6{2, 1, 4, 3, 7, 5};
  const auto six = pearson(x6, y6);
  const double t4 = std::abs(six.r) * std::sqrt(4.0 / (1.0 - six.r * six.r));
  const double th = std::atan(t4 / 2.0);
  o.require(std::abs(six.p - (1.0 - std::sin(th) * (1.0 + std::cos(th) * std::cos(th) / 2.0))) <= kClosedFormTol,
            "p (4 df)");
  const double z6 = std::atanh(six.r), h6 = 1.96 / std::sqrt(3.0);
  o.require(std::abs(six.ci_low - std::tanh(z6 - h6)) <= kClosedFormTol &&
                std::abs(six.ci_high - std::tanh(z6 + h6)) <= kClosedFormTol,
            "Fisher CI (n = 6)");

  std::mt19937_64 gen(11);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  for (int trial = 0; trial < kAffineCases; ++trial) {
    const std::size_t n = 4 + gen() % 300;
    std::vector<double> a(n), b(n), scaled(n);
    const double slope = std::exp(2 * n01(gen)), shift = 100 * n01(gen);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = 150 + 40 * n01(gen);
      b[i] = 0.3 * a[i] + 40 * n01(gen);
      scaled[i] = slope * a[i] + shift;
    }
    worst = std::max(worst, std::abs(pearson(scaled, b).r - pearson(a, b).r));
  }
  o.require(worst <= kAffineTol, fmt::format("affine max deviation {:.3g}", worst));
  o.notes.push_back(fmt::format("affine worst {:.2g}", worst));
  return o;
}

// ---- corpus-anchored ----

Outcome natural_corpus(const fs::path& manifest) {
  Outcome o;
  TempDir dir("accept_natural");
  run_analyze(manifest, dir / "natural.csv", dir / "natural.log.json", {});
  const auto trajs = read_trajectory_csv(dir / "natural.csv");
  GamRunOptions opts;
  opts.group = Grouping::kTone;
  const auto run = run_gam(trajs, opts);
  const double r2 = run.fit.adjusted_r2.value_or(NAN);
  o.require(std::abs(r2 - kNaturalAdjR2) <= kNaturalAdjR2Tol, fmt::format("adjusted R2 {:.4f}", r2));
  for (const auto& t : run.terms) o.require(t.testable && t.p < kTermAlpha, fmt::format("term {} p = {:.3g}", t.name, t.p));
  std::vector<NormalizedTrajectory> trimmed;
  for (const auto& t : trajs) trimmed.push_back(trim_onset(t, kNaturalTrim));
  const auto checks = tone_shape_checks(mean_trajectory(trimmed, group_by::tone));
  o.require(checks.t1_flattest, "T1 not the flattest");
  o.require(checks.t4_falling, "T4 not strictly falling");
  o.require(checks.t2_rising, "T2 not rising");
  o.notes.push_back(fmt::format("{} tokens, adjusted R2 {:.4f}", trajs.size(), r2));
  return o;
}

Outcome corpus_anchored() {
  if (const char* m = std::getenv("TONELENS_NATURAL_MANIFEST"); m != nullptr && *m != '\0') {
    return natural_corpus(m);
  }
  Outcome o;
  o.notes.push_back("natural corpus absent; synthetic four-category substitute");
  synthetic_gam_checks(o);
  return o;
}

// ---- determinism ----

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

// Two natural speakers and a generated model with layer taps, all synthetic.
void write_pipeline_corpus(const fs::path& dir) {
  fs::create_directories(dir / "wav");
  std::ofstream natural(dir / "natural.jsonl"), taps(dir / "taps.jsonl"), outputs(dir / "outputs.jsonl");
  const std::vector<std::function<double(double)>> tones{
      [](double) { return 210.0; }, [](double t) { return 160 + 90 * t; },
      [](double t) { return 190 - 90 * t + 90 * t * t; }, [](double t) { return 290 - 130 * t; }};
  std::mt19937_64 gen(31);
  std::normal_distribution<double> jitter(0.0, 6.0);
  for (int tone = 0; tone < 4; ++tone) {
    for (int rep = 0; rep < 4; ++rep) {
      const double offset = jitter(gen);
      const std::string id = fmt::format("ma{}_{}V{}", tone + 1, rep % 2 ? 'M' : 'F', rep);
      write_wav(dir / "wav" / (id + ".wav"),
                voiced_syllable([&, tone](double t) { return tones[tone](t) + offset; }, 0.35));
      natural << fmt::format(R"({{"path":"wav/{}.wav","token_id":"{}","source":"natural","tone":"T{}"}})", id, id,
                             tone + 1)
              << "\n";

      const std::string out_id = fmt::format("gen_c{}_{}", tone, rep);
      write_wav(dir / "wav" / (out_id + ".wav"),
                voiced_syllable([&, tone](double t) { return tones[3 - tone](t) + offset; }, 0.3));
      outputs << fmt::format(
                     R"({{"path":"wav/{}.wav","token_id":"{}","source":"generated","c_index":{},"model_id":"m"}})",
                     out_id, out_id, tone)
              << "\n";
      const std::string tap_id = out_id + "_l4";
      write_wav(dir / "wav" / (tap_id + ".wav"),
                voiced_syllable([&, tone](double t) { return 0.8 * tones[3 - tone](t) + 30 + jitter(gen); }, 0.3));
      taps << fmt::format(
                  R"({{"path":"wav/{}.wav","token_id":"{}","source":"layer_tap","layer_index":4,"c_index":{},"model_id":"m"}})",
                  tap_id, out_id, tone)
           << "\n";
    }
  }
}

Outcome determinism(const std::string& cli) {
  Outcome o;
  if (cli.empty() || !fs::exists(cli)) {
    o.require(false, "CLI binary not found; pass --cli");
    return o;
  }
  TempDir root("accept_determinism");
  std::vector<std::map<std::string, std::string>> artifacts;
  for (const char* run : {"run1", "run2"}) {
    const fs::path d = root / run;
    write_pipeline_corpus(d);
    const std::string q = "\"" + d.string() + "/";
    const std::vector<std::string> steps{
        "analyze --manifest " + q + "natural.jsonl\" --out " + q + "natural.csv\"",
        "analyze --manifest " + q + "outputs.jsonl\" --out " + q + "outputs.csv\"",
        "analyze --manifest " + q + "taps.jsonl\" --layer 4 --out " + q + "taps.csv\"",
        "gam --traj " + q + "natural.csv\" --group tone --trim-onset 0.2 --out " + q + "gam_natural.json\"",
        "gam --traj " + q + "outputs.csv\" --group c_index --out " + q + "gam_outputs.json\"",
        "correlate --a " + q + "taps.csv\" --b " + q + "outputs.csv\" --out " + q + "corr.json\"",
        "report --traj " + q + "natural.csv\" --traj " + q + "outputs.csv\" --gam " + q + "gam_natural.json\" --gam " +
            q + "gam_outputs.json\" --corr " + q + "corr.json\" --out-dir " + q + "report\""};
    for (const auto& step : steps) {
      const int rc = run_cli(cli, step);
      o.require(rc == 0, fmt::format("{}: `{}` exited {}", run, step.substr(0, step.find(' ')), rc));
    }
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(d)) {
      if (!entry.is_regular_file() || entry.path().extension() == ".wav") continue;
      files[fs::relative(entry.path(), d).string()] = read_text(entry.path());
    }
    artifacts.push_back(std::move(files));
  }
  o.require(artifacts[0].size() == artifacts[1].size(), "artifact sets differ");
  std::size_t compared = 0;
  for (const auto& [name, bytes] : artifacts[0]) {
    const auto it = artifacts[1].find(name);
    if (it == artifacts[1].end() || it->second != bytes) {
      o.require(false, name + " differs");
    } else {
      ++compared;
    }
  }
  o.require(compared >= 12, fmt::format("only {} artifacts produced", compared));
  o.notes.push_back(fmt::format("{} artifacts byte-identical", compared));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("tonelens acceptance suite");
  std::vector<std::string> selected;
  std::string cli;
  bool list = false;
  app.add_option("--criterion", selected, "run only these criteria");
  app.add_option("--cli", cli, "path to the tonelens executable");
  app.add_flag("--list", list, "list criterion names");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"pitch_accuracy", pitch_accuracy},
      {"gate_exactness", gate_exactness},
      {"normalization_contract", normalization_contract},
      {"gam_correctness", gam_correctness},
      {"correlation_machinery", correlation_machinery},
      {"corpus_anchored", corpus_anchored},
      {"determinism", [&] { return determinism(cli); }},
  };
  if (list) {
    for (const auto& [name, fn] : criteria) fmt::print("{}\n", name);
    return 0;
  }
  configure_threads();

  int failures = 0, ran = 0;
  for (const auto& [name, fn] : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), name) == selected.end()) continue;
    ++ran;
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    std::string detail;
    for (const auto& n : out.notes) detail += (detail.empty() ? "" : "; ") + n;
    fmt::print("{} {}: {}\n", out.pass ? "PASS" : "FAIL", name, detail);
    if (!out.pass) ++failures;
  }
  if (ran == 0) {
    fmt::print(stderr, "no criterion matched\n");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
