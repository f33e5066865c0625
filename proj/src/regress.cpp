// Copyright 2026 The madfold Authors. All Rights Reserved.
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

#include "madfold/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

#include "madfold/error.hpp"
#include "madfold/fold.hpp"

namespace madfold {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_finite(std::span<const double> x, std::string_view what) {
  // v - v is 0 for finite v and NaN otherwise; one branch per row keeps the
  // hot loop vectorizable
  double probe = 0.0;
  for (double v : x) probe += v - v;
  if (probe != 0.0) throw Error(ErrorKind::kNumeric, std::string(what) + " is not finite");
}

// log(sigma(s)) without overflow for large |s|.
double log_sigmoid(double s) {
  return s >= 0.0 ? -std::log1p(std::exp(-s)) : s - std::log1p(std::exp(s));
}

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

double binary_label(const RowView& row) {
  if (!row.y) {
    throw Error(ErrorKind::kData, "logistic regression needs a label column");
  }
  const double y = *row.y;
  if (y != 0.0 && y != 1.0) {
    throw Error(ErrorKind::kData, "label at row " + std::to_string(row.row_id) +
                                      " is " + std::to_string(y) +
                                      ", expected 0 or 1");
  }
  return y;
}

}  // namespace

void linregr_transition(LinRegrState& state, double y, std::span<const double> x) {
  if (!std::isfinite(y)) throw Error(ErrorKind::kNumeric, "label is not finite");
  require_finite(x, "feature vector");
  if (state.num_rows == 0 && state.width_of_x == 0) {
    // The first row determines the number of independent variables.
    state.width_of_x = x.size();
    state.X_transp_Y.assign(x.size(), 0.0);
    state.X_transp_X = SymMatrixLower(x.size());
  } else if (x.size() != state.width_of_x) {
    throw_dimension("linregr row", state.width_of_x, x.size());
  }
  state.num_rows++;
  state.y_sum += y;
  state.y_square_sum += y * y;
  double* xty = state.X_transp_Y.data();
  for (std::size_t j = 0; j < x.size(); ++j) xty[j] += x[j] * y;
  state.X_transp_X.rank_one_update(x);
}

void linregr_merge(LinRegrState& into, const LinRegrState& other) {
  if (other.width_of_x == 0) return;
  if (into.width_of_x == 0) {
    into = other;
    return;
  }
  if (into.width_of_x != other.width_of_x) {
    throw_dimension("linregr merge", into.width_of_x, other.width_of_x);
  }
  into.num_rows += other.num_rows;
  into.y_sum += other.y_sum;
  into.y_square_sum += other.y_square_sum;
  for (std::size_t j = 0; j < into.width_of_x; ++j) {
    into.X_transp_Y[j] += other.X_transp_Y[j];
  }
  into.X_transp_X += other.X_transp_X;
}

LinRegrResult linregr_final(const LinRegrState& state) {
  if (state.num_rows == 0) {
    throw Error(ErrorKind::kEmptyInput, "linear regression over zero rows");
  }
  const std::size_t d = state.width_of_x;
  const auto decomposition = spd_pseudo_inverse(state.X_transp_X);
  const DenseMatrix& inverse = decomposition.pseudo_inverse;

  LinRegrResult out;
  out.num_rows = state.num_rows;
  out.rank = decomposition.rank;
  out.condition_no = decomposition.condition_no;
  out.coef = inverse.multiply(state.X_transp_Y);

  const double n = static_cast<double>(state.num_rows);
  const double coef_xty = dot(out.coef, state.X_transp_Y);
  const double coef_xtx_coef = dot(out.coef, state.X_transp_X.multiply(out.coef));
  double ssr = state.y_square_sum - 2.0 * coef_xty + coef_xtx_coef;
  double sst = state.y_square_sum - state.y_sum * state.y_sum / n;
  // Both are differences of O(y_square_sum) terms; anything within a few ulps
  // of that scale is cancellation noise.
  const double ssr_tol =
      16.0 * kEps *
      (state.y_square_sum + 2.0 * std::abs(coef_xty) + std::abs(coef_xtx_coef));
  const double sst_tol = 16.0 * kEps * state.y_square_sum;
  if (ssr <= ssr_tol) ssr = 0.0;
  if (sst <= sst_tol) sst = 0.0;

  if (sst == 0.0) {
    out.r2 = ssr == 0.0 ? 1.0 : 0.0;
  } else {
    out.r2 = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
  }

  if (state.num_rows <= decomposition.rank) {
    throw Error(ErrorKind::kDegreesOfFreedom,
                "need more rows than the rank of X^T X (" +
                    std::to_string(state.num_rows) + " rows, rank " +
                    std::to_string(decomposition.rank) + ")");
  }
  out.dof = state.num_rows - decomposition.rank;
  const double sigma2 = ssr / static_cast<double>(out.dof);

  out.std_err.resize(d);
  out.t_stats.resize(d);
  out.p_values.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double se = std::sqrt(std::max(0.0, sigma2 * inverse(j, j)));
    out.std_err[j] = se;
    double t;
    if (se > 0.0) {
      t = out.coef[j] / se;
    } else if (out.coef[j] == 0.0) {
      t = 0.0;
    } else {
      t = std::copysign(std::numeric_limits<double>::infinity(), out.coef[j]);
    }
    out.t_stats[j] = t;
    out.p_values[j] = student_t_two_sided_p(t, out.dof);
  }
  return out;
}

void LinRegrFold::transition(LinRegrState& state, const RowView& row) const {
  if (!row.y) {
    throw Error(ErrorKind::kData, "linear regression needs a label column");
  }
  linregr_transition(state, *row.y, row.x);
}

LinRegrResult linregr(const Dataset& data, std::size_t p) {
  return run_parallel(LinRegrFold{}, data, p);
}

double student_t_two_sided_p(double t, std::size_t dof) {
  if (dof == 0) {
    throw Error(ErrorKind::kArgument, "Student-t needs dof >= 1");
  }
  if (std::isnan(t)) throw Error(ErrorKind::kNumeric, "t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  const double nu = static_cast<double>(dof);
  const double x = nu / (nu + t * t);
  if (x >= 1.0) return 1.0;
  return std::clamp(boost::math::ibeta(nu / 2.0, 0.5, x), 0.0, 1.0);
}

LogRegrState LogRegrStepFold::identity() const {
  LogRegrState state;
  state.coef_prev = coef_;
  state.X_transp_D_X = SymMatrixLower(coef_.size());
  state.X_transp_D_Z.assign(coef_.size(), 0.0);
  return state;
}

void LogRegrStepFold::transition(LogRegrState& state, const RowView& row) const {
  if (row.x.size() != coef_.size()) {
    throw_dimension("logregr row", coef_.size(), row.x.size());
  }
  const double y = binary_label(row);
  const double eta = dot(row.x, coef_);
  const double mu = sigmoid(eta);
  const double weight = std::max(mu * (1.0 - mu), 1e-12);
  // x * D * z = x * (D * eta + y - mu)
  const double dz = weight * eta + (y - mu);
  for (std::size_t j = 0; j < row.x.size(); ++j) {
    state.X_transp_D_Z[j] += row.x[j] * dz;
  }
  state.X_transp_D_X.rank_one_update(row.x, weight);
  state.log_likelihood += log_sigmoid(y == 1.0 ? eta : -eta);
  state.num_rows++;
}

void LogRegrStepFold::merge(LogRegrState& into, const LogRegrState& other) const {
  if (into.X_transp_D_Z.size() != other.X_transp_D_Z.size()) {
    throw_dimension("logregr merge", into.X_transp_D_Z.size(),
                    other.X_transp_D_Z.size());
  }
  into.X_transp_D_X += other.X_transp_D_X;
  for (std::size_t j = 0; j < into.X_transp_D_Z.size(); ++j) {
    into.X_transp_D_Z[j] += other.X_transp_D_Z[j];
  }
  into.log_likelihood += other.log_likelihood;
  into.num_rows += other.num_rows;
}

IrlsStep logregr_irls_step(const Dataset& data, std::span<const double> coef,
                           std::size_t p) {
  if (coef.size() != data.n_features()) {
    throw_dimension("logregr coefficients", data.n_features(), coef.size());
  }
  if (data.n_rows() == 0) {
    throw Error(ErrorKind::kEmptyInput, "logistic regression over zero rows");
  }
  const LogRegrStepFold fold(Vector(coef.begin(), coef.end()));
  const LogRegrState state = run_parallel(fold, data, p);
  const auto decomposition = spd_pseudo_inverse(state.X_transp_D_X);
  IrlsStep step;
  step.coef_next = decomposition.pseudo_inverse.multiply(state.X_transp_D_Z);
  step.log_likelihood = state.log_likelihood;
  step.rank = decomposition.rank;
  return step;
}

double logregr_log_likelihood(const Dataset& data, std::span<const double> coef,
                              std::size_t p) {
  if (coef.size() != data.n_features()) {
    throw_dimension("logregr coefficients", data.n_features(), coef.size());
  }
  auto fold = make_fold<RowView>(
      0.0,
      [&coef](double& ll, const RowView& row) {
        const double eta = dot(row.x, coef);
        ll += log_sigmoid(binary_label(row) == 1.0 ? eta : -eta);
      },
      [](double& into, const double& other) { into += other; },
      [](const double& ll) { return ll; });
  return run_parallel(fold, data, p);
}

LogRegrResult logregr_fit(const Dataset& data, const LogRegrOptions& options) {
  if (!(options.tol > 0.0)) {
    throw Error(ErrorKind::kArgument, "tol must be > 0");
  }
  const std::size_t d = data.n_features();
  const Vector start(d, 0.0);

  auto step = [](const Vector& coef, const Dataset& rows,
                 std::size_t p) -> StepOutcome<Vector> {
    IrlsStep next = logregr_irls_step(rows, coef, p);
    const double norm_prev = max_abs(coef);
    const double norm_next = max_abs(next.coef_next);
    if (!(norm_next <= 1e8)) {
      throw Error(ErrorKind::kPerfectSeparation,
                  "perfect separation: coefficient magnitude exceeded 1e8");
    }
    if (next.log_likelihood > -1e-6 && norm_next >= norm_prev && norm_prev > 0.0) {
      throw Error(ErrorKind::kPerfectSeparation,
                  "perfect separation: log-likelihood approaches 0 while the "
                  "coefficients keep growing");
    }
    return {std::move(next.coef_next), next.log_likelihood};
  };

  auto converged = [&](const IterationLedger<Vector>& ledger) {
    const std::size_t m = ledger.size();
    const Vector& current = *ledger[m - 1].snapshot;
    const Vector& previous = m >= 2 ? *ledger[m - 2].snapshot : start;
    double delta = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      delta = std::max(delta, std::abs(current[j] - previous[j]));
    }
    return delta < options.tol;
  };

  auto run = iterate(step, data, options.p, start, converged, options.max_iter,
                     options.ledger);
  run.rethrow_if_failed();

  LogRegrResult out;
  out.coef = std::move(run.state);
  out.converged = run.converged;
  out.num_iterations = run.ledger.size();
  const auto trace = run.ledger.diagnostics();
  for (std::size_t m = 1; m < trace.size(); ++m) {
    if (trace[m] < trace[m - 1] - 1e-12 * std::max(1.0, std::abs(trace[m - 1]))) {
      out.monotone = false;
    }
  }
  out.log_likelihood = logregr_log_likelihood(data, out.coef, options.p);
  out.ledger = std::move(run.ledger);
  return out;
}

}  // namespace madfold
