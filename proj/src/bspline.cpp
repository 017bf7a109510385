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

#include "tonelens/error.hpp"
#include "tonelens/gam.hpp"

namespace tonelens {

std::vector<double> geometric_grid(double lo, double hi, int steps) {
  if (!(lo > 0.0 && hi >= lo && steps >= 1)) {
    throw Error(ErrorKind::kParameter, "geometric grid needs 0 < lo <= hi and steps >= 1");
  }
  std::vector<double> grid(steps);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < steps; ++i) {
    grid[i] = steps == 1 ? lo : std::pow(10.0, a + (b - a) * i / (steps - 1));
  }
  return grid;
}

void validate(const GamSpec& spec) {
  if (spec.n_categories < 2) throw Error(ErrorKind::kParameter, "need at least two categories");
  if (spec.spline_degree < 1) throw Error(ErrorKind::kParameter, "spline degree must be >= 1");
  if (spec.basis_dim <= spec.spline_degree + 1) {
    throw Error(ErrorKind::kParameter, "basis_dim must exceed spline_degree + 1");
  }
  if (spec.penalty_order < 1 || spec.penalty_order >= spec.basis_dim) {
    throw Error(ErrorKind::kParameter, "penalty order must be in [1, basis_dim)");
  }
  if (spec.lambda_grid.empty()) throw Error(ErrorKind::kParameter, "empty lambda grid");
  for (std::size_t i = 0; i < spec.lambda_grid.size(); ++i) {
    if (!(spec.lambda_grid[i] > 0.0) || (i > 0 && !(spec.lambda_grid[i] > spec.lambda_grid[i - 1]))) {
      throw Error(ErrorKind::kParameter, "lambda grid must be positive and strictly increasing");
    }
  }
}

std::vector<double> open_uniform_knots(int basis_dim, int degree) {
  const int interior = basis_dim - degree - 1;
  if (interior < 0) throw Error(ErrorKind::kParameter, "basis_dim too small for degree");
  std::vector<double> knots;
  knots.reserve(basis_dim + degree + 1);
  knots.insert(knots.end(), degree + 1, 0.0);
  for (int i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i) / (interior + 1));
  knots.insert(knots.end(), degree + 1, 1.0);
  return knots;
}

Eigen::VectorXd bspline_basis(std::span<const double> knots, int degree, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::kDomain, "basis evaluated outside [0, 1]");
  const int p = degree;
  const int n_basis = static_cast<int>(knots.size()) - p - 1;
  if (n_basis < 1) throw Error(ErrorKind::kParameter, "knot vector too short for degree");

  // Span index s with knots[s] <= t < knots[s + 1]; the right boundary
  // belongs to the last nonempty span.
  int span;
  if (t >= knots[n_basis]) {
    span = n_basis - 1;
  } else {
    auto it = std::upper_bound(knots.begin() + p, knots.begin() + n_basis + 1, t);
    span = static_cast<int>(it - knots.begin()) - 1;
  }

  // Triangular Cox–de Boor evaluation of the p + 1 nonzero functions.
  std::vector<double> N(p + 1, 0.0), left(p + 1, 0.0), right(p + 1, 0.0);
  N[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = t - knots[span + 1 - j];
    right[j] = knots[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom != 0.0 ? N[r] / denom : 0.0;
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }

  Eigen::VectorXd row = Eigen::VectorXd::Zero(n_basis);
  for (int j = 0; j <= p; ++j) row(span - p + j) = N[j];
  return row;
}

Eigen::MatrixXd difference_matrix(int p, int order) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(p, p);
  for (int k = 0; k < order; ++k) {
    Eigen::MatrixXd next(D.rows() - 1, p);
    for (Eigen::Index r = 0; r + 1 < D.rows(); ++r) next.row(r) = D.row(r + 1) - D.row(r);
    D = std::move(next);
  }
  return D;
}

}  // namespace tonelens
