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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tonelens {

std::vector<double> geometric_grid(double lo, double hi, int steps);

/// Model: f0 ~ category + s(time, by = category).
struct GamSpec {
  int n_categories = 4;
  int basis_dim = 10;
  int spline_degree = 3;
  int penalty_order = 2;
  std::vector<double> lambda_grid = geometric_grid(1e-4, 1e6, 41);
};

void validate(const GamSpec& spec);

/// Clamped knot vector on [0, 1]: degree + 1 copies of each boundary and
/// basis_dim - degree - 1 uniformly spaced interior knots.
std::vector<double> open_uniform_knots(int basis_dim, int degree);

/// B-spline basis row at t. Length is knots.size() - degree - 1; entries
/// sum to 1 and at most degree + 1 are nonzero. Throws kDomain outside [0, 1].
Eigen::VectorXd bspline_basis(std::span<const double> knots, int degree, double t);

/// (p - order) x p matrix of order-th forward differences.
Eigen::MatrixXd difference_matrix(int p, int order);

struct GamObservation {
  double time = 0.0;  // normalized, in [0, 1]
  int category = 0;
  double f0 = 0.0;
};

struct PenaltyBlock {
  Eigen::Index offset = 0;
  Eigen::MatrixXd matrix;  // square, applied to coefficients [offset, offset + rows)
};

struct SmoothTerm {
  std::string name;
  int category = 0;
  Eigen::Index offset = 0;
  Eigen::Index size = 0;
  Eigen::VectorXd column_means;  // centering applied to this category's rows
};

struct GamDesign {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<PenaltyBlock> penalties;
  // Coefficient directions u with X u = 0 by construction: the constant
  // vector of each centered smooth block and the columns of any category
  // without rows. The solver pins these to zero.
  std::vector<Eigen::VectorXd> null_directions;
  std::vector<std::string> column_names;
  std::vector<SmoothTerm> smooths;
  std::vector<std::string> warnings;
  std::vector<double> knots;
  GamSpec spec;
  int n_parametric = 0;  // intercept plus category dummies
};

/// Columns: intercept, n_categories - 1 treatment dummies (category 0 is the
/// reference), then one basis_dim block per category. Each block is nonzero
/// only on its category's rows and is centered over them. Penalties are DᵀD
/// with D the penalty_order-th difference operator.
GamDesign build_design(std::span<const GamObservation> obs, const GamSpec& spec,
                       const std::vector<std::string>& category_labels = {});

struct TermTest {
  enum class Kind { kParametric, kFactor, kSmooth };
  std::string name;
  Kind kind = Kind::kParametric;
  double statistic = 0.0;
  double df = 0.0;
  double p = 1.0;
  bool testable = true;
};

struct GamFit {
  Eigen::VectorXd coefficients;
  double lambda = 0.0;
  double edf = 0.0;
  double rss = 0.0;
  double tss = 0.0;
  std::optional<double> adjusted_r2;  // empty when tss == 0
  double gcv = 0.0;
  Eigen::Index n_obs = 0;
  Eigen::MatrixXd penalized_inverse;  // (XᵀX + λS + C)⁻¹
  Eigen::VectorXd edf_per_coefficient;
  std::vector<std::pair<double, double>> gcv_trace;  // (λ, GCV) when selected over a grid
};

/// XᵀX, columns in parallel. Each entry is a fixed-order sum.
Eigen::MatrixXd gram(const Eigen::MatrixXd& X);

/// Penalized least squares for one design, reusable across λ.
class PenalizedSystem {
 public:
  PenalizedSystem(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const std::vector<PenaltyBlock>& penalties,
                  const std::vector<Eigen::VectorXd>& null_directions = {});

  /// Solves (XᵀX + λS) β = Xᵀy by LDLT. Throws kSingular when the
  /// penalized normal matrix is numerically singular.
  GamFit fit(double lambda) const;

  /// GCV(λ) = n·rss / (n - edf)²; +inf when the system is singular.
  double gcv(double lambda) const;

  const Eigen::MatrixXd& penalty() const { return penalty_; }

 private:
  const Eigen::MatrixXd& X_;
  const Eigen::VectorXd& y_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd xty_;
  Eigen::MatrixXd penalty_;
  Eigen::MatrixXd constraint_;
  double tss_ = 0.0;
};

GamFit fit_penalized(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<PenaltyBlock>& penalties, double lambda,
                     const std::vector<Eigen::VectorXd>& null_directions = {});

/// Evaluates GCV at every grid λ (in parallel) and returns the fit at the
/// minimum; ties go to the larger λ.
GamFit select_lambda(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<PenaltyBlock>& penalties, const GamSpec& spec,
                     const std::vector<Eigen::VectorXd>& null_directions = {});

GamFit select_lambda(const GamDesign& design);

/// Approximate Wald tests. Parametric coefficients get a t test on n - edf
/// degrees of freedom; each smooth block gets βᵀV⁻¹β against a chi-square
/// with ceil(block edf) degrees of freedom, V = σ̂²(XᵀX + λS)⁻¹. A joint
/// Wald test of all category dummies is appended as the factor term.
std::vector<TermTest> term_significance(const GamFit& fit, const GamDesign& design);

/// Fitted curve of one category at normalized time t.
double predict(const GamDesign& design, const GamFit& fit, int category, double t);

namespace reference {
Eigen::MatrixXd gram(const Eigen::MatrixXd& X);
GamFit select_lambda(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<PenaltyBlock>& penalties, const GamSpec& spec,
                     const std::vector<Eigen::VectorXd>& null_directions = {});
}  // namespace reference

}  // namespace tonelens
