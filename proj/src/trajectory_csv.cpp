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
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "tonelens/error.hpp"
#include "tonelens/trajectory.hpp"

namespace tonelens {

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace

std::string format_trajectory_csv(const std::vector<NormalizedTrajectory>& trajs) {
  std::string out = kTrajectoryCsvHeader;
  out += '\n';
  for (const auto& t : trajs) {
    const std::string prefix =
        fmt::format("{},{},{},{},{}", csv_field(t.meta.token_id), to_string(t.meta.source),
                    csv_field(t.meta.model_id.value_or("")),
                    t.meta.c_index ? std::to_string(*t.meta.c_index) : "",
                    t.meta.tone ? std::string(to_string(*t.meta.tone)) : "");
    for (std::size_t k = 0; k < t.points.size(); ++k) {
      out += prefix;
      out += fmt::format(",{},", k);
      if (t.points[k]) out += fmt::format("{}", *t.points[k]);
      out += '\n';
    }
  }
  return out;
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<NormalizedTrajectory>& trajs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << format_trajectory_csv(trajs);
}

std::vector<NormalizedTrajectory> parse_trajectory_csv(std::string_view text,
                                                       const std::string& source_name) {
  auto fail = [&](std::size_t line, const std::string& why) -> Error {
    return Error(ErrorKind::kSchema, source_name + ":" + std::to_string(line) + ": " + why);
  };

  std::vector<NormalizedTrajectory> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<bool>> seen;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (!header_seen) {
      if (line != kTrajectoryCsvHeader) throw fail(line_number, "unexpected header");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    const auto f = split_csv_line(line);
    if (f.size() != 7) throw fail(line_number, "expected 7 fields");

    TokenMeta meta;
    meta.token_id = f[0];
    try {
      meta.source = parse_source(f[1]);
      if (!f[2].empty()) meta.model_id = f[2];
      if (!f[3].empty()) meta.c_index = std::stoi(f[3]);
      if (!f[4].empty()) meta.tone = parse_tone(f[4]);
    } catch (const std::exception& e) {
      throw fail(line_number, e.what());
    }

    std::size_t point = 0;
    std::optional<double> value;
    try {
      std::size_t used = 0;
      point = std::stoul(f[5], &used);
      if (used != f[5].size()) throw std::invalid_argument("point_index");
      if (!f[6].empty()) {
        value = std::stod(f[6], &used);
        if (used != f[6].size()) throw std::invalid_argument("f0_hz");
      }
    } catch (const std::exception&) {
      throw fail(line_number, "non-numeric point_index or f0_hz");
    }
    if (point >= kTrajectoryPoints) throw fail(line_number, "point_index out of range");

    const std::string key = meta.token_id + '\x1f' + f[3];
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      NormalizedTrajectory t;
      t.meta = meta;
      t.points.resize(kTrajectoryPoints);
      out.push_back(std::move(t));
      seen.emplace_back(kTrajectoryPoints, false);
    }
    if (seen[it->second][point]) {
      throw fail(line_number, "duplicate point " + std::to_string(point) + " for token '" +
                                  meta.token_id + "'");
    }
    seen[it->second][point] = true;
    out[it->second].points[point] = value;
  }
  if (!header_seen) throw fail(1, "empty file");
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto covered = std::count(seen[i].begin(), seen[i].end(), true);
    if (covered != static_cast<long>(kTrajectoryPoints)) {
      throw fail(line_number, "token '" + out[i].meta.token_id + "' has " +
                                  std::to_string(covered) + " of 50 points");
    }
  }
  return out;
}

std::vector<NormalizedTrajectory> read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trajectory_csv(ss.str(), path.string());
}

}  // namespace tonelens
