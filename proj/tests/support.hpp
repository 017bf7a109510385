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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "tonelens/corpus.hpp"
#include "tonelens/gam.hpp"

namespace tonelens::testing {

inline AudioClip sine(double hz, double seconds, int rate = 16000, double amp = 0.5) {
  AudioClip c;
  c.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  for (std::size_t i = 0; i < n; ++i) c.samples.push_back(amp * std::sin(2 * std::numbers::pi * hz * i / rate));
  return c;
}

// Linear chirp f(t) = f0 + (f1 - f0) t / T.
inline AudioClip chirp(double f0, double f1, double seconds, int rate = 16000, double amp = 0.5) {
  AudioClip c;
  c.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  const double k = (f1 - f0) / seconds;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    c.samples.push_back(amp * std::sin(2 * std::numbers::pi * (f0 * t + 0.5 * k * t * t)));
  }
  return c;
}

inline AudioClip white_noise(std::uint64_t seed, double seconds, int rate = 16000) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AudioClip c;
  c.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  for (std::size_t i = 0; i < n; ++i) c.samples.push_back(u(gen));
  return c;
}

// Harmonic tone with an F0 contour, a crude stand-in for a voiced syllable.
template <typename Contour>
AudioClip voiced_syllable(Contour f0_of_t, double seconds, int rate = 16000) {
  AudioClip c;
  c.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    phase += 2 * std::numbers::pi * f0_of_t(t / seconds) / rate;
    const double env = std::sin(std::numbers::pi * t / seconds);
    c.samples.push_back(0.6 * env * (std::sin(phase) + 0.5 * std::sin(2 * phase) + 0.25 * std::sin(3 * phase)) / 1.75);
  }
  return c;
}

struct WavSpec {
  std::uint16_t format = 1;
  std::uint16_t channels = 1;
  std::uint32_t rate = 16000;
  std::uint16_t bits = 16;
  bool extensible = false;
};

// Hand-assembled RIFF/WAVE bytes around raw sample data.
inline std::vector<std::uint8_t> make_wav(const WavSpec& s, const std::vector<std::uint8_t>& data) {
  std::vector<std::uint8_t> out;
  auto u16 = [&](std::uint16_t v) {
    out.push_back(v & 0xFF);
    out.push_back(v >> 8);
  };
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
  };
  auto tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  const std::uint32_t fmt_size = s.extensible ? 40 : 16;
  const std::uint16_t align = s.channels * (s.bits / 8);
  tag("RIFF");
  u32(4 + 8 + fmt_size + 8 + static_cast<std::uint32_t>(data.size()));
  tag("WAVE");
  tag("fmt ");
  u32(fmt_size);
  u16(s.extensible ? 0xFFFE : s.format);
  u16(s.channels);
  u32(s.rate);
  u32(s.rate * align);
  u16(align);
  u16(s.bits);
  if (s.extensible) {
    u16(22);
    u16(s.bits);
    u32(0);
    u16(s.format);
    const std::uint8_t guid_tail[14] = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                        0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};
    out.insert(out.end(), guid_tail, guid_tail + 14);
  }
  tag("data");
  u32(static_cast<std::uint32_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());
  return out;
}

inline void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tonelens_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Category mean curves for the four-way synthetic corpus.
inline double synthetic_curve(int category, double t) {
  switch (category) {
    case 0: return 200.0;
    case 1: return 150.0 + 100.0 * t;
    case 2: return 200.0 - 80.0 * t + 80.0 * t * t;
    default: return 280.0 - 120.0 * t;
  }
}

inline std::vector<GamObservation> synthetic_corpus(std::uint64_t seed, int tokens_per_category,
                                                    double sigma) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<GamObservation> obs;
  for (int c = 0; c < 4; ++c) {
    for (int tok = 0; tok < tokens_per_category; ++tok) {
      for (int k = 0; k < 50; ++k) {
        const double t = k / 49.0;
        obs.push_back({t, c, synthetic_curve(c, t) + noise(gen)});
      }
    }
  }
  return obs;
}

}  // namespace tonelens::testing
