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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tonelens {

inline constexpr int kPipelineRate = 16000;

/// Mono sample buffer normalized to [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kPipelineRate;
  std::string token_id;

  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class Source { kNatural, kGenerated, kLayerTap };
enum class Tone { kT1 = 0, kT2 = 1, kT3 = 2, kT4 = 3 };
enum class Sex { kFemale, kMale };

std::string_view to_string(Source s);
std::string_view to_string(Tone t);
std::string_view to_string(Sex s);
Source parse_source(std::string_view s);
Tone parse_tone(std::string_view s);
Sex parse_sex(std::string_view s);

/// Identity of one analyzed token.
///
/// Natural tokens carry a tone; generated and layer-tap tokens carry the
/// categorical code index. Layer taps also carry the generator layer they
/// were read from (2, 3 or 4).
struct TokenMeta {
  std::string token_id;
  Source source = Source::kNatural;
  std::optional<int> layer_index;
  std::optional<Tone> tone;
  std::optional<int> c_index;
  std::optional<std::string> speaker;
  std::optional<Sex> sex;
  std::optional<std::string> syllable;
  std::optional<std::string> model_id;

  bool operator==(const TokenMeta&) const = default;
};

/// Throws Error{kValidation} naming the offending field.
void validate(const TokenMeta& meta);

// ---- WAV ----

/// Reads RIFF/WAVE PCM (8/16/24/32-bit) or 32-bit float, mono or stereo.
/// Stereo is averaged to mono; samples are scaled by the format's full-scale
/// value. The token id is the file stem.
AudioClip load_wav(const std::filesystem::path& path);
AudioClip decode_wav(std::span<const std::uint8_t> bytes);

/// Writes 16-bit PCM mono. Samples are clamped to [-1, 1].
void write_wav(const std::filesystem::path& path, const AudioClip& clip);
std::vector<std::uint8_t> encode_wav16(const AudioClip& clip);

/// Linear-interpolation resampling onto the target-rate grid. The output
/// holds round(n * target / source) samples; positions past the last source
/// sample hold its value.
AudioClip resample(const AudioClip& clip, int target_rate);

// ---- metadata sources ----

struct ManifestEntry {
  TokenMeta meta;
  std::filesystem::path path;
};

/// JSON Lines manifest, one record per token. Relative paths are resolved
/// against the manifest's directory.
std::vector<ManifestEntry> scan_manifest(const std::filesystem::path& path);
TokenMeta parse_manifest_record(std::string_view line, std::size_t line_number);
std::string format_manifest_record(const ManifestEntry& entry);

/// `<syllable><tone>_<F|M>V<digit>[.ext]`, e.g. "xiang4_MV3.wav".
TokenMeta parse_corpus_filename(std::string_view name);
std::string format_corpus_filename(const TokenMeta& meta);

}  // namespace tonelens
