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

#include <cmath>

#include "tonelens/error.hpp"
#include "tonelens/report.hpp"

namespace tonelens {

using nlohmann::ordered_json;

Grouping parse_grouping(std::string_view s) {
  if (s == "tone") return Grouping::kTone;
  if (s == "c_index") return Grouping::kCIndex;
  throw Error(ErrorKind::kParameter, "group must be tone or c_index");
}

std::string_view to_string(Grouping g) { return g == Grouping::kTone ? "tone" : "c_index"; }

namespace {

std::vector<std::string> category_labels(Grouping g, int n) {
  std::vector<std::string> labels;
  for (int c = 0; c < n; ++c) {
    labels.push_back(g == Grouping::kTone ? "tone=T" + std::to_string(c + 1)
                                          : "c_index=" + std::to_string(c));
  }
  return labels;
}

ordered_json number_or_null(double v, bool valid = true) {
  return valid && std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

}  // namespace

std::vector<GamObservation> gam_observations(const std::vector<NormalizedTrajectory>& trajs,
                                             Grouping group, double trim_fraction,
                                             std::size_t* skipped) {
  std::vector<GamObservation> obs;
  std::size_t missing_group = 0;
  for (const auto& raw : trajs) {
    std::optional<int> category;
    if (group == Grouping::kTone && raw.meta.tone) category = static_cast<int>(*raw.meta.tone);
    if (group == Grouping::kCIndex && raw.meta.c_index) category = *raw.meta.c_index;
    if (!category) {
      ++missing_group;
      continue;
    }
    const NormalizedTrajectory t = trim_fraction > 0.0 ? trim_onset(raw, trim_fraction) : raw;
    const std::size_t n = t.points.size();
    for (std::size_t k = 0; k < n; ++k) {
      if (!t.points[k]) continue;
      obs.push_back({static_cast<double>(k) / (n - 1), *category, *t.points[k]});
    }
  }
  if (skipped) *skipped = missing_group;
  return obs;
}

GamRun run_gam(const std::vector<NormalizedTrajectory>& trajs, const GamRunOptions& options) {
  GamRun run;
  const auto obs = gam_observations(trajs, options.group, options.trim_onset, &run.skipped_tokens);
  if (obs.empty()) throw Error(ErrorKind::kEmptyInput, "no present trajectory points to fit");
  run.design =
      build_design(obs, options.spec, category_labels(options.group, options.spec.n_categories));
  run.fit = select_lambda(run.design);
  run.terms = term_significance(run.fit, run.design);
  return run;
}

ordered_json gam_summary_json(const GamRun& run, const GamRunOptions& options) {
  const auto& fit = run.fit;
  ordered_json j;
  j["lambda"] = fit.lambda;
  j["edf"] = fit.edf;
  j["adjusted_r2"] = fit.adjusted_r2 ? ordered_json(*fit.adjusted_r2) : ordered_json(nullptr);
  j["n_obs"] = fit.n_obs;
  ordered_json coefs = ordered_json::array();
  for (Eigen::Index i = 0; i < fit.coefficients.size(); ++i) coefs.push_back(fit.coefficients(i));
  j["coefficients"] = std::move(coefs);
  j["coefficient_names"] = run.design.column_names;

  ordered_json terms = ordered_json::array();
  for (const auto& t : run.terms) {
    ordered_json term;
    term["name"] = t.name;
    term["kind"] = t.kind == TermTest::Kind::kParametric ? "parametric"
                   : t.kind == TermTest::Kind::kSmooth   ? "smooth"
                                                         : "factor";
    term["statistic"] = number_or_null(t.statistic, t.testable);
    term["df"] = number_or_null(t.df, t.testable);
    term["p"] = number_or_null(t.p, t.testable);
    if (!t.testable) term["untestable"] = true;
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);

  ordered_json gcv = ordered_json::array();
  for (const auto& [lambda, value] : fit.gcv_trace) {
    gcv.push_back({{"lambda", lambda}, {"gcv", number_or_null(value)}});
  }

  const auto& spec = options.spec;
  j["model"] = {
      {"formula", "f0 ~ " + std::string(to_string(options.group)) + " + s(time, by = " +
                      std::string(to_string(options.group)) + ")"},
      {"group", std::string(to_string(options.group))},
      {"basis", "cubic B-spline, clamped uniform knots"},
      {"basis_dim", spec.basis_dim},
      {"spline_degree", spec.spline_degree},
      {"penalty", "difference penalty of order " + std::to_string(spec.penalty_order)},
      {"identifiability", "smooth blocks centered within category"},
      {"smoothing_selection", "GCV over a grid, one lambda shared by all smooths"},
      {"significance", "approximate Wald tests"},
      {"lambda_grid",
       {{"min", spec.lambda_grid.front()},
        {"max", spec.lambda_grid.back()},
        {"steps", spec.lambda_grid.size()}}},
      {"trim_onset", options.trim_onset},
      {"skipped_tokens", run.skipped_tokens},
      {"warnings", run.design.warnings},
  };
  j["gcv"] = std::move(gcv);
  return j;
}

ordered_json correlation_json(const CorrelationResult& r) {
  ordered_json j;
  j["r"] = r.r;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["n"] = r.n;
  j["p"] = r.p;
  j["unmatched_keys"] = r.unmatched_keys;
  if (r.mean_token_r) j["mean_token_r"] = *r.mean_token_r;
  return j;
}

}  // namespace tonelens
