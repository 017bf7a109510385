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
#include <limits>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "tonelens/error.hpp"
#include "tonelens/gam.hpp"
#include "tonelens/parallel.hpp"

namespace tonelens {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

GamDesign build_design(std::span<const GamObservation> obs, const GamSpec& spec,
                       const std::vector<std::string>& category_labels) {
  validate(spec);
  const int n_cat = spec.n_categories;
  const int k = spec.basis_dim;
  auto label = [&](int c) {
    return c < static_cast<int>(category_labels.size()) ? category_labels[c] : std::to_string(c);
  };

  std::vector<std::vector<Index>> rows_of(n_cat);
  std::vector<std::set<double>> times_of(n_cat);
  for (std::size_t r = 0; r < obs.size(); ++r) {
    const auto& o = obs[r];
    if (o.category < 0 || o.category >= n_cat) {
      throw Error(ErrorKind::kValidation, "category " + std::to_string(o.category) + " out of range");
    }
    if (!std::isfinite(o.f0)) throw Error(ErrorKind::kValidation, "non-finite response");
    rows_of[o.category].push_back(static_cast<Index>(r));
    times_of[o.category].insert(o.time);
  }
  const auto present = std::count_if(rows_of.begin(), rows_of.end(),
                                     [](const auto& rows) { return !rows.empty(); });
  if (present < 2) throw Error(ErrorKind::kInsufficientData, "need at least two categories present");

  GamDesign d;
  d.spec = spec;
  d.knots = open_uniform_knots(k, spec.spline_degree);
  d.n_parametric = n_cat;
  const Index n = static_cast<Index>(obs.size());
  const Index p = n_cat + static_cast<Index>(n_cat) * k;
  d.X = MatrixXd::Zero(n, p);
  d.y.resize(n);

  d.column_names.push_back("(Intercept)");
  for (int c = 1; c < n_cat; ++c) d.column_names.push_back(label(c));
  for (int c = 0; c < n_cat; ++c) {
    for (int j = 0; j < k; ++j) {
      d.column_names.push_back("s(time):" + label(c) + "." + std::to_string(j + 1));
    }
  }

  for (Index r = 0; r < n; ++r) {
    const auto& o = obs[r];
    d.y(r) = o.f0;
    d.X(r, 0) = 1.0;
    if (o.category > 0) d.X(r, o.category) = 1.0;
  }

  const MatrixXd D = difference_matrix(k, spec.penalty_order);
  const MatrixXd S = D.transpose() * D;

  for (int c = 0; c < n_cat; ++c) {
    SmoothTerm term;
    term.name = "s(time):" + label(c);
    term.category = c;
    term.offset = n_cat + static_cast<Index>(c) * k;
    term.size = k;
    term.column_means = VectorXd::Zero(k);

    const auto& rows = rows_of[c];
    if (rows.empty()) {
      d.warnings.push_back("category " + label(c) + " has no observations");
      if (c > 0) d.null_directions.push_back(VectorXd::Unit(p, c));
      for (int j = 0; j < k; ++j) d.null_directions.push_back(VectorXd::Unit(p, term.offset + j));
      d.smooths.push_back(std::move(term));
      continue;
    }
    if (static_cast<int>(times_of[c].size()) < k) {
      d.warnings.push_back("rank deficiency: category " + label(c) + " has " +
                           std::to_string(times_of[c].size()) + " distinct time points, fewer than basis_dim " +
                           std::to_string(k));
    }

    for (Index r : rows) {
      d.X.block(r, term.offset, 1, k) = bspline_basis(d.knots, spec.spline_degree, obs[r].time).transpose();
    }
    for (Index r : rows) term.column_means += d.X.block(r, term.offset, 1, k).transpose();
    term.column_means /= static_cast<double>(rows.size());
    for (Index r : rows) d.X.block(r, term.offset, 1, k) -= term.column_means.transpose();

    // Basis rows sum to one, so after centering the constant coefficient
    // vector maps to zero.
    VectorXd u = VectorXd::Zero(p);
    u.segment(term.offset, k).setConstant(1.0 / std::sqrt(static_cast<double>(k)));
    d.null_directions.push_back(std::move(u));

    d.penalties.push_back({term.offset, S});
    d.smooths.push_back(std::move(term));
  }
  return d;
}

MatrixXd gram(const MatrixXd& X) {
  const Index p = X.cols();
  const Index n = X.rows();
  MatrixXd G(p, p);
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
  for (Index i = 0; i < p; ++i) {
    const double* xi = X.col(i).data();
    for (Index j = i; j < p; ++j) {
      const double* xj = X.col(j).data();
      double s = 0.0;
      for (Index r = 0; r < n; ++r) s += xi[r] * xj[r];
      G(i, j) = s;
      G(j, i) = s;
    }
  }
  return G;
}

PenalizedSystem::PenalizedSystem(const MatrixXd& X, const VectorXd& y,
                                 const std::vector<PenaltyBlock>& penalties,
                                 const std::vector<VectorXd>& null_directions)
    : X_(X), y_(y) {
  if (X.rows() != y.size()) throw Error(ErrorKind::kParameter, "design rows != response length");
  if (X.rows() == 0) throw Error(ErrorKind::kEmptyInput, "no observations");
  const Index p = X.cols();
  gram_ = gram(X);
  xty_ = X.transpose() * y;

  penalty_ = MatrixXd::Zero(p, p);
  for (const auto& b : penalties) {
    const Index m = b.matrix.rows();
    if (b.matrix.cols() != m || b.offset < 0 || b.offset + m > p) {
      throw Error(ErrorKind::kParameter, "penalty block does not fit the design");
    }
    penalty_.block(b.offset, b.offset, m, m) += b.matrix;
  }

  // Pinning X-null directions leaves the hat matrix unchanged; scaling to
  // the Gram diagonal keeps the factorization well conditioned.
  constraint_ = MatrixXd::Zero(p, p);
  const double scale = std::max(1.0, gram_.diagonal().maxCoeff());
  for (const auto& u : null_directions) {
    if (u.size() != p) throw Error(ErrorKind::kParameter, "null direction has wrong length");
    constraint_ += scale * (u * u.transpose()) / u.squaredNorm();
  }

  const double mean = y.mean();
  std::vector<double> sq(y.size());
  for (Index i = 0; i < y.size(); ++i) sq[i] = (y(i) - mean) * (y(i) - mean);
  tss_ = deterministic_sum(sq);
}

GamFit PenalizedSystem::fit(double lambda) const {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::kParameter, "lambda must be >= 0");
  const Index n = X_.rows();
  const Index p = X_.cols();

  const MatrixXd A = gram_ + lambda * penalty_ + constraint_;
  Eigen::LDLT<MatrixXd> ldlt(A);
  const double rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(rcond > 1e-13)) {
    throw Error(ErrorKind::kSingular, "penalized normal matrix is singular at lambda = " +
                                          std::to_string(lambda) +
                                          (lambda == 0.0 ? "; use a positive lambda" : ""));
  }

  GamFit fit;
  fit.lambda = lambda;
  fit.n_obs = n;
  fit.coefficients = ldlt.solve(xty_);
  fit.penalized_inverse = ldlt.solve(MatrixXd::Identity(p, p));
  fit.edf_per_coefficient = (fit.penalized_inverse * gram_).diagonal();
  fit.edf = fit.edf_per_coefficient.sum();

  const VectorXd residual = y_ - X_ * fit.coefficients;
  std::vector<double> sq(n);
  for (Index i = 0; i < n; ++i) sq[i] = residual(i) * residual(i);
  fit.rss = deterministic_sum(sq);
  fit.tss = tss_;
  if (tss_ > 0.0 && n - fit.edf > 0.0 && n > 1) {
    fit.adjusted_r2 = 1.0 - (fit.rss / (n - fit.edf)) / (tss_ / (n - 1));
  }
  const double dof = n - fit.edf;
  fit.gcv = dof > 0.0 ? n * fit.rss / (dof * dof) : std::numeric_limits<double>::infinity();
  return fit;
}

double PenalizedSystem::gcv(double lambda) const {
  try {
    return fit(lambda).gcv;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kSingular) throw;
    return std::numeric_limits<double>::infinity();
  }
}

GamFit fit_penalized(const MatrixXd& X, const VectorXd& y, const std::vector<PenaltyBlock>& penalties,
                     double lambda, const std::vector<VectorXd>& null_directions) {
  const PenalizedSystem system(X, y, penalties, null_directions);
  return system.fit(lambda);
}

namespace {

// Smallest GCV; an exact tie goes to the later (larger) λ.
std::size_t grid_argmin(const std::vector<double>& gcv) {
  std::size_t best = gcv.size();
  for (std::size_t i = 0; i < gcv.size(); ++i) {
    if (!std::isfinite(gcv[i])) continue;
    if (best == gcv.size() || gcv[i] <= gcv[best]) best = i;
  }
  return best;
}

GamFit finish_selection(const PenalizedSystem& system, const std::vector<double>& grid,
                        const std::vector<double>& gcv) {
  const std::size_t best = grid_argmin(gcv);
  if (best == gcv.size()) throw Error(ErrorKind::kSingular, "every lambda on the grid is singular");
  GamFit fit = system.fit(grid[best]);
  for (std::size_t i = 0; i < grid.size(); ++i) fit.gcv_trace.emplace_back(grid[i], gcv[i]);
  return fit;
}

}  // namespace

GamFit select_lambda(const MatrixXd& X, const VectorXd& y, const std::vector<PenaltyBlock>& penalties,
                     const GamSpec& spec, const std::vector<VectorXd>& null_directions) {
  if (spec.lambda_grid.empty()) throw Error(ErrorKind::kParameter, "empty lambda grid");
  const PenalizedSystem system(X, y, penalties, null_directions);
  const auto& grid = spec.lambda_grid;
  std::vector<double> gcv(grid.size());
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.size()); ++i) {
    gcv[i] = system.gcv(grid[i]);
  }
  return finish_selection(system, grid, gcv);
}

GamFit select_lambda(const GamDesign& design) {
  return select_lambda(design.X, design.y, design.penalties, design.spec, design.null_directions);
}

std::vector<TermTest> term_significance(const GamFit& fit, const GamDesign& design) {
  const double n = static_cast<double>(fit.n_obs);
  const double resid_df = n - fit.edf;
  if (!(resid_df > 0.0)) throw Error(ErrorKind::kInsufficientData, "edf must be below n for tests");
  const double sigma2 = fit.rss / resid_df;
  const MatrixXd V = sigma2 * fit.penalized_inverse;

  std::vector<TermTest> tests;
  const boost::math::students_t t_dist(resid_df);
  for (int j = 0; j < design.n_parametric; ++j) {
    TermTest t;
    t.name = design.column_names[j];
    t.kind = TermTest::Kind::kParametric;
    t.df = resid_df;
    const double var = V(j, j);
    if (!(var > 0.0)) {
      t.testable = false;
    } else {
      t.statistic = fit.coefficients(j) / std::sqrt(var);
      t.p = 2.0 * boost::math::cdf(boost::math::complement(t_dist, std::abs(t.statistic)));
    }
    tests.push_back(std::move(t));
  }

  auto wald = [&](TermTest& t, Index offset, Index size, double df) {
    const VectorXd b = fit.coefficients.segment(offset, size);
    const MatrixXd Vb = V.block(offset, offset, size, size);
    Eigen::LDLT<MatrixXd> ldlt(Vb);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(ldlt.rcond() > 1e-15) || !(df > 0.0)) {
      t.testable = false;
      return;
    }
    t.df = df;
    t.statistic = b.dot(ldlt.solve(b));
    const boost::math::chi_squared chi(df);
    t.p = boost::math::cdf(boost::math::complement(chi, std::max(t.statistic, 0.0)));
  };

  for (const auto& s : design.smooths) {
    TermTest t;
    t.name = s.name;
    t.kind = TermTest::Kind::kSmooth;
    const double block_edf = fit.edf_per_coefficient.segment(s.offset, s.size).sum();
    wald(t, s.offset, s.size, std::ceil(block_edf - 1e-9));
    tests.push_back(std::move(t));
  }

  if (design.n_parametric > 1) {
    TermTest t;
    t.name = "category";
    t.kind = TermTest::Kind::kFactor;
    wald(t, 1, design.n_parametric - 1, design.n_parametric - 1);
    tests.push_back(std::move(t));
  }
  return tests;
}

double predict(const GamDesign& design, const GamFit& fit, int category, double t) {
  if (category < 0 || category >= design.spec.n_categories) {
    throw Error(ErrorKind::kParameter, "category out of range");
  }
  double value = fit.coefficients(0);
  if (category > 0) value += fit.coefficients(category);
  const SmoothTerm& s = design.smooths[category];
  const VectorXd basis = bspline_basis(design.knots, design.spec.spline_degree, t);
  value += (basis - s.column_means).dot(fit.coefficients.segment(s.offset, s.size));
  return value;
}

namespace reference {

MatrixXd gram(const MatrixXd& X) {
  const Index p = X.cols();
  MatrixXd G = MatrixXd::Zero(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i; j < p; ++j) {
      double s = 0.0;
      for (Index r = 0; r < X.rows(); ++r) s += X(r, i) * X(r, j);
      G(i, j) = s;
      G(j, i) = s;
    }
  }
  return G;
}

GamFit select_lambda(const MatrixXd& X, const VectorXd& y, const std::vector<PenaltyBlock>& penalties,
                     const GamSpec& spec, const std::vector<VectorXd>& null_directions) {
  if (spec.lambda_grid.empty()) throw Error(ErrorKind::kParameter, "empty lambda grid");
  const PenalizedSystem system(X, y, penalties, null_directions);
  std::vector<double> gcv;
  for (double lambda : spec.lambda_grid) gcv.push_back(system.gcv(lambda));
  return finish_selection(system, spec.lambda_grid, gcv);
}

}  // namespace reference
}  // namespace tonelens
