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
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "tonelens/error.hpp"
#include "tonelens/report.hpp"

namespace tonelens {

using nlohmann::ordered_json;

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 64, kRight = 128, kTop = 40, kBottom = 48;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string sanitize(std::string_view s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  return out;
}

std::vector<double> present_values(const std::vector<std::optional<double>>& points) {
  std::vector<double> v;
  for (const auto& p : points) {
    if (p) v.push_back(*p);
  }
  return v;
}

ordered_json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSchema, path.string() + ": " + e.what());
  }
}

double require_number(const ordered_json& j, const char* field, const std::filesystem::path& file,
                      bool nullable = false) {
  auto it = j.find(field);
  if (it != j.end() && it->is_number()) return it->get<double>();
  if (nullable && it != j.end() && it->is_null()) return std::nan("");
  throw Error(ErrorKind::kSchema, file.string() + ": field '" + field + "' missing or not a number");
}

ordered_json points_json(const std::vector<std::optional<double>>& points) {
  ordered_json a = ordered_json::array();
  for (const auto& p : points) a.push_back(p ? ordered_json(*p) : ordered_json(nullptr));
  return a;
}

}  // namespace

std::string render_svg(const std::string& title, const std::vector<PlotSeries>& series) {
  std::size_t n = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    n = std::max(n, s.points.size());
    for (double v : present_values(s.points)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  } else {
    lo = std::floor(lo / 10.0) * 10.0;
    hi = std::ceil(hi / 10.0) * 10.0;
    if (hi <= lo) hi = lo + 10.0;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const double x_span = n > 1 ? static_cast<double>(n - 1) : 1.0;
  auto px = [&](double i) { return kLeft + plot_w * i / x_span; };
  auto py = [&](double v) { return kTop + plot_h * (hi - v) / (hi - lo); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight, kWidth, kHeight);
  svg += fmt::format("<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kWidth, kHeight);
  svg += fmt::format("<text x=\"{:.2f}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     kLeft + plot_w / 2, xml_escape(title));
  svg += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      kLeft, kTop, plot_w, plot_h);

  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    svg += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>"
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.0f}</text>\n",
        kLeft, py(v), kLeft + plot_w, py(v), kLeft - 6, py(v) + 4, v);
  }
  if (n > 1) {
    for (std::size_t i = 0; i < n; i += 10) {
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px(i),
                         kTop + plot_h + 16, i);
    }
  }
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">normalized time point</text>\n",
      kLeft + plot_w / 2, kHeight - 10);
  svg += fmt::format(
      "<text x=\"16\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2f})\">F0 "
      "(Hz)</text>\n",
      kTop + plot_h / 2, kTop + plot_h / 2);

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    const auto& pts = series[s].points;
    svg += fmt::format("<g data-series=\"{}\">\n", xml_escape(series[s].label));
    std::vector<std::pair<double, double>> run;
    auto flush = [&] {
      if (run.size() == 1) {
        svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"{}\"/>\n",
                           run[0].first, run[0].second, color);
      } else if (run.size() >= 2) {
        std::string coords;
        for (const auto& [x, y] : run) {
          if (!coords.empty()) coords += ' ';
          coords += fmt::format("{:.2f},{:.2f}", x, y);
        }
        svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n",
                           color, coords);
      }
      run.clear();
    };
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i]) {
        run.emplace_back(px(static_cast<double>(i)), py(*pts[i]));
      } else {
        flush();
      }
    }
    flush();
    svg += "</g>\n";
    const double ly = kTop + 8 + 18.0 * s;
    svg += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
        "stroke-width=\"2\"/><text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n",
        kWidth - kRight + 12, ly, kWidth - kRight + 36, ly, color, kWidth - kRight + 42, ly + 4,
        xml_escape(series[s].label));
  }
  svg += "</svg>\n";
  return svg;
}

ordered_json ToneShapeChecks::to_json() const {
  return {{"t1_flattest", t1_flattest},
          {"t4_falling", t4_falling},
          {"t2_rising", t2_rising},
          {"t3_dipping", t3_dipping},
          {"total_variation_hz", total_variation}};
}

ToneShapeChecks tone_shape_checks(const std::vector<MeanTrajectory>& tone_means) {
  std::map<std::string, std::vector<double>> by_tone;
  for (const auto& m : tone_means) by_tone[m.group_key] = present_values(m.points);

  ToneShapeChecks c;
  c.total_variation.assign(4, std::nan(""));
  for (int t = 0; t < 4; ++t) {
    auto it = by_tone.find("T" + std::to_string(t + 1));
    if (it == by_tone.end() || it->second.size() < 2) continue;
    double tv = 0.0;
    for (std::size_t i = 1; i < it->second.size(); ++i) tv += std::abs(it->second[i] - it->second[i - 1]);
    c.total_variation[t] = tv;
  }
  const bool all = std::all_of(c.total_variation.begin(), c.total_variation.end(),
                               [](double v) { return std::isfinite(v); });
  if (!all) return c;

  c.t1_flattest = c.total_variation[0] < *std::min_element(c.total_variation.begin() + 1, c.total_variation.end());
  const auto& t4 = by_tone["T4"];
  c.t4_falling = std::adjacent_find(t4.begin(), t4.end(), std::less_equal<>()) == t4.end();
  const auto& t2 = by_tone["T2"];
  c.t2_rising = t2.back() > t2.front();
  const auto& t3 = by_tone["T3"];
  const double t3_min = *std::min_element(t3.begin(), t3.end());
  c.t3_dipping = t3_min < t3.front() && t3_min < t3.back();
  return c;
}

ordered_json reference_values_json() {
  ordered_json j;
  j["note"] = "published anchor values for comparison; not reproduced by this toolkit";
  j["adjusted_r2"] = {{"natural_tone", 0.267},
                      {"male_model", 0.12},
                      {"whole_model", 0.021},
                      {"female_model", 0.0184}};
  j["layer_correlation_male_model"] = {
      {"conv4", {{"r", 0.26}, {"ci_low", 0.258}, {"ci_high", 0.264}}},
      {"conv3", {{"r", 0.078}, {"ci_low", 0.076}, {"ci_high", 0.082}}},
      {"conv2", {{"r", -0.0042}, {"ci_low", -0.0073}, {"ci_high", -0.0014}}},
  };
  return j;
}

ordered_json run_report(const ReportInputs& inputs, const std::filesystem::path& out_dir) {
  if (inputs.trajectories.empty() && inputs.gam_summaries.empty() && inputs.correlations.empty()) {
    throw Error(ErrorKind::kEmptyInput, "report needs at least one input artifact");
  }
  std::filesystem::create_directories(out_dir);

  ordered_json summary;
  ordered_json traj_list = ordered_json::array();
  for (const auto& file : inputs.trajectories) {
    const auto trajs = read_trajectory_csv(file);
    std::map<std::string, std::vector<NormalizedTrajectory>> by_model;
    for (const auto& t : trajs) {
      const std::string key = t.meta.source == Source::kNatural
                                  ? "natural"
                                  : t.meta.model_id.value_or("model") + "_" +
                                        std::string(to_string(t.meta.source));
      by_model[key].push_back(t);
    }
    for (auto& [model, group] : by_model) {
      const bool natural = model == "natural";
      const double trim = natural ? 0.2 : 0.0;
      if (natural) {
        for (auto& t : group) t = trim_onset(t, trim);
      }
      const auto means = mean_trajectory(group, natural ? GroupSelector(group_by::tone)
                                                        : GroupSelector(group_by::c_index));
      std::vector<PlotSeries> series;
      ordered_json means_json = ordered_json::array();
      for (const auto& m : means) {
        series.push_back({(natural ? "" : "c") + m.group_key, m.points});
        means_json.push_back({{"key", m.group_key}, {"points", points_json(m.points)}, {"counts", m.counts}});
      }
      const std::string plot_name = sanitize(file.stem().string() + "__" + model) + ".svg";
      const std::string title = file.stem().string() + " / " + model + " (" +
                                std::to_string(group.size()) + " tokens)";
      std::ofstream(out_dir / plot_name, std::ios::binary) << render_svg(title, series);

      ordered_json entry;
      entry["file"] = file.filename().string();
      entry["model"] = model;
      entry["group_by"] = natural ? "tone" : "c_index";
      entry["trim_onset"] = trim;
      entry["tokens"] = group.size();
      entry["plot"] = plot_name;
      entry["means"] = std::move(means_json);
      if (natural) entry["shape_checks"] = tone_shape_checks(means).to_json();
      traj_list.push_back(std::move(entry));
    }
  }
  summary["trajectories"] = std::move(traj_list);

  ordered_json gam_list = ordered_json::array();
  for (const auto& file : inputs.gam_summaries) {
    const auto j = read_json_file(file);
    ordered_json e;
    e["file"] = file.filename().string();
    const double r2 = require_number(j, "adjusted_r2", file, true);
    e["adjusted_r2"] = std::isfinite(r2) ? ordered_json(r2) : ordered_json(nullptr);
    e["lambda"] = require_number(j, "lambda", file);
    e["edf"] = require_number(j, "edf", file);
    e["n_obs"] = require_number(j, "n_obs", file);
    if (!j.contains("terms") || !j["terms"].is_array()) {
      throw Error(ErrorKind::kSchema, file.string() + ": field 'terms' missing or not an array");
    }
    e["terms"] = j["terms"].size();
    gam_list.push_back(std::move(e));
  }
  summary["gam"] = std::move(gam_list);

  ordered_json corr_list = ordered_json::array();
  for (const auto& file : inputs.correlations) {
    const auto j = read_json_file(file);
    ordered_json e;
    e["file"] = file.filename().string();
    for (const char* field : {"r", "ci_low", "ci_high", "n", "p"}) e[field] = require_number(j, field, file);
    corr_list.push_back(std::move(e));
  }
  summary["correlations"] = std::move(corr_list);
  summary["reference_values"] = reference_values_json();

  write_json(out_dir / "report_summary.json", summary);
  return summary;
}

}  // namespace tonelens
