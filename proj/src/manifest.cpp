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

#include <fstream>
#include <regex>

#include "json.hpp"

#include "tonelens/corpus.hpp"
#include "tonelens/error.hpp"

namespace tonelens {

using nlohmann::json;

std::string_view to_string(Source s) {
  switch (s) {
    case Source::kNatural: return "natural";
    case Source::kGenerated: return "generated";
    case Source::kLayerTap: return "layer_tap";
  }
  return "natural";
}

std::string_view to_string(Tone t) {
  static constexpr std::string_view kNames[] = {"T1", "T2", "T3", "T4"};
  return kNames[static_cast<int>(t)];
}

std::string_view to_string(Sex s) { return s == Sex::kFemale ? "female" : "male"; }

Source parse_source(std::string_view s) {
  if (s == "natural") return Source::kNatural;
  if (s == "generated") return Source::kGenerated;
  if (s == "layer_tap") return Source::kLayerTap;
  throw Error(ErrorKind::kValidation, "source: unknown value '" + std::string(s) + "'");
}

Tone parse_tone(std::string_view s) {
  if (s.size() == 2 && s[0] == 'T' && s[1] >= '1' && s[1] <= '4') {
    return static_cast<Tone>(s[1] - '1');
  }
  throw Error(ErrorKind::kValidation, "tone: expected T1..T4, got '" + std::string(s) + "'");
}

Sex parse_sex(std::string_view s) {
  if (s == "female") return Sex::kFemale;
  if (s == "male") return Sex::kMale;
  throw Error(ErrorKind::kValidation, "sex: expected female|male, got '" + std::string(s) + "'");
}

void validate(const TokenMeta& meta) {
  if (meta.token_id.empty()) throw Error(ErrorKind::kValidation, "token_id: must be non-empty");
  if (meta.c_index && (*meta.c_index < 0 || *meta.c_index > 3)) {
    throw Error(ErrorKind::kValidation, "c_index: must be in 0..3");
  }
  switch (meta.source) {
    case Source::kNatural:
      if (!meta.tone) throw Error(ErrorKind::kValidation, "tone: required for natural tokens");
      break;
    case Source::kGenerated:
    case Source::kLayerTap:
      if (!meta.c_index) {
        throw Error(ErrorKind::kValidation, "c_index: required for " +
                                                std::string(to_string(meta.source)) + " tokens");
      }
      break;
  }
  if (meta.source == Source::kLayerTap) {
    if (!meta.layer_index) {
      throw Error(ErrorKind::kValidation, "layer_index: required for layer_tap tokens");
    }
    if (*meta.layer_index < 2 || *meta.layer_index > 4) {
      throw Error(ErrorKind::kValidation, "layer_index: must be 2, 3 or 4");
    }
  } else if (meta.layer_index) {
    throw Error(ErrorKind::kValidation, "layer_index: only valid for layer_tap tokens");
  }
}

namespace {

template <typename T>
std::optional<T> optional_field(const json& rec, const char* name) {
  auto it = rec.find(name);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kValidation, std::string(name) + ": wrong type");
  }
}

}  // namespace

TokenMeta parse_manifest_record(std::string_view line, std::size_t line_number) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, "line " + std::to_string(line_number) + ": " + e.what());
  }
  if (!rec.is_object()) {
    throw Error(ErrorKind::kParse, "line " + std::to_string(line_number) + ": not a JSON object");
  }

  try {
    TokenMeta meta;
    auto token_id = optional_field<std::string>(rec, "token_id");
    if (!token_id) throw Error(ErrorKind::kValidation, "token_id: missing");
    meta.token_id = *token_id;
    auto source = optional_field<std::string>(rec, "source");
    if (!source) throw Error(ErrorKind::kValidation, "source: missing");
    meta.source = parse_source(*source);
    meta.layer_index = optional_field<int>(rec, "layer_index");
    if (auto tone = optional_field<std::string>(rec, "tone")) meta.tone = parse_tone(*tone);
    meta.c_index = optional_field<int>(rec, "c_index");
    meta.speaker = optional_field<std::string>(rec, "speaker");
    if (auto sex = optional_field<std::string>(rec, "sex")) meta.sex = parse_sex(*sex);
    meta.syllable = optional_field<std::string>(rec, "syllable");
    meta.model_id = optional_field<std::string>(rec, "model_id");
    validate(meta);
    return meta;
  } catch (const Error& e) {
    throw Error(e.kind(), "line " + std::to_string(line_number) + ": " + e.what());
  }
}

std::string format_manifest_record(const ManifestEntry& entry) {
  const TokenMeta& m = entry.meta;
  json rec = json::object();
  rec["path"] = entry.path.generic_string();
  rec["token_id"] = m.token_id;
  rec["source"] = std::string(to_string(m.source));
  if (m.layer_index) rec["layer_index"] = *m.layer_index;
  if (m.tone) rec["tone"] = std::string(to_string(*m.tone));
  if (m.c_index) rec["c_index"] = *m.c_index;
  if (m.speaker) rec["speaker"] = *m.speaker;
  if (m.sex) rec["sex"] = std::string(to_string(*m.sex));
  if (m.syllable) rec["syllable"] = *m.syllable;
  if (m.model_id) rec["model_id"] = *m.model_id;
  return rec.dump();
}

std::vector<ManifestEntry> scan_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest " + path.string());
  const auto base = path.parent_path();

  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    ManifestEntry entry;
    entry.meta = parse_manifest_record(line, line_number);
    const auto rec = json::parse(line);
    auto p = rec.find("path");
    if (p == rec.end() || !p->is_string()) {
      throw Error(ErrorKind::kValidation, "line " + std::to_string(line_number) + ": path: missing");
    }
    std::filesystem::path file = p->get<std::string>();
    entry.path = file.is_absolute() ? file : base / file;
    entries.push_back(std::move(entry));
  }
  return entries;
}

TokenMeta parse_corpus_filename(std::string_view name) {
  const std::string stem = std::filesystem::path(std::string(name)).stem().string();
  static const std::regex kPattern(R"(^([^0-9_./]+)([1-4])_([FM])V([0-9])$)");
  std::smatch m;
  if (!std::regex_match(stem, m, kPattern)) {
    throw Error(ErrorKind::kPattern, "'" + std::string(name) +
                                         "' does not match <syllable><tone>_<F|M>V<digit>");
  }
  TokenMeta meta;
  meta.token_id = stem;
  meta.source = Source::kNatural;
  meta.syllable = m[1].str();
  meta.tone = static_cast<Tone>(m[2].str()[0] - '1');
  meta.sex = m[3].str() == "F" ? Sex::kFemale : Sex::kMale;
  meta.speaker = m[3].str() + "V" + m[4].str();
  return meta;
}

std::string format_corpus_filename(const TokenMeta& meta) {
  if (!meta.syllable || !meta.tone || !meta.sex || !meta.speaker) {
    throw Error(ErrorKind::kValidation, "filename formatting needs syllable, tone, sex and speaker");
  }
  return *meta.syllable + std::to_string(static_cast<int>(*meta.tone) + 1) + "_" + *meta.speaker +
         ".wav";
}

}  // namespace tonelens
