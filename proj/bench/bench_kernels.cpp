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

// Serial reference kernels against their OpenMP counterparts.
//
//   tonelens_bench [--reps N]
//
// Thread count follows TONELENS_THREADS / OMP_NUM_THREADS.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "tonelens/gam.hpp"
#include "tonelens/parallel.hpp"
#include "tonelens/pitch.hpp"
#include "tonelens/report.hpp"

using namespace tonelens;
namespace fs = std::filesystem;

namespace {

AudioClip glide(double f0, double f1, double seconds) {
  AudioClip c;
  c.sample_rate = kPipelineRate;
  const auto n = static_cast<std::size_t>(seconds * c.sample_rate);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    phase += 2 * std::numbers::pi * (f0 + (f1 - f0) * t) / c.sample_rate;
    c.samples.push_back(0.4 * std::sin(phase) + 0.2 * std::sin(2 * phase));
  }
  return c;
}

std::vector<GamObservation> corpus(int tokens) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> noise(0.0, 5.0);
  std::vector<GamObservation> obs;
  for (int c = 0; c < 4; ++c) {
    for (int tok = 0; tok < tokens; ++tok) {
      for (int k = 0; k < 50; ++k) {
        const double t = k / 49.0;
        obs.push_back({t, c, 150.0 + 30.0 * c + 40.0 * (c - 1.5) * t + noise(gen)});
      }
    }
  }
  return obs;
}

double best_of(int reps, const std::function<void()>& fn) {
  double best = INFINITY;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const std::string& name, double serial_ms, double parallel_ms) {
  fmt::print("{:<28} {:>12.3f} {:>12.3f} {:>8.2f}x\n", name, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("tonelens kernel benchmark");
  int reps = 5;
  app.add_option("--reps", reps, "repetitions; the best time is reported")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  configure_threads();

  fmt::print("threads: {}\n", thread_count());
  fmt::print("{:<28} {:>12} {:>12} {:>9}\n", "kernel", "serial ms", "parallel ms", "speedup");

  const auto clip = glide(90, 320, 5.0);
  row("track_pitch (5 s)", best_of(reps, [&] { reference::track_pitch(clip, {}); }),
      best_of(reps, [&] { track_pitch(clip, {}); }));

  const auto design = build_design(corpus(250), GamSpec{});
  row("gram (50000 x 44)", best_of(reps, [&] { reference::gram(design.X); }),
      best_of(reps, [&] { gram(design.X); }));
  row("select_lambda (41 grid)",
      best_of(reps, [&] {
        reference::select_lambda(design.X, design.y, design.penalties, design.spec, design.null_directions);
      }),
      best_of(reps, [&] { select_lambda(design); }));

  std::vector<double> values(4'000'000);
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : values) v = u(gen);
  row("sum (4M doubles)", best_of(reps, [&] { reference::serial_sum(values); }),
      best_of(reps, [&] { deterministic_sum(values); }));

  const fs::path dir = fs::temp_directory_path() / "tonelens_bench";
  fs::create_directories(dir);
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < 64; ++i) {
    ManifestEntry e;
    e.path = dir / fmt::format("tok{}.wav", i);
    e.meta.token_id = fmt::format("tok{}", i);
    e.meta.source = Source::kGenerated;
    e.meta.c_index = i % 4;
    write_wav(e.path, glide(120 + i, 260 - i, 0.4));
    entries.push_back(e);
  }
  row("analyze (64 tokens)", best_of(reps, [&] { reference::analyze_entries(entries, {}); }),
      best_of(reps, [&] { analyze_entries(entries, {}); }));
  fs::remove_all(dir);
  return 0;
}
