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

#pragma once

// Linear and logistic regression as aggregates over a Dataset.
//
// OLS is a single pass: the transition accumulates n, sum(y), sum(y^2),
// X^T y and the lower triangle of X^T X; merge adds the sums; final solves
// the normal equations through the eigen pseudo-inverse and derives the
// inference statistics. Logistic regression runs one weighted pass per IRLS
// iteration under the driver loop. No intercept is added implicitly.

#include <cstddef>
#include <span>

#include "madfold/dataset.hpp"
#include "madfold/iterate.hpp"
#include "madfold/linalg.hpp"

namespace madfold {

struct LinRegrState {
  std::size_t num_rows = 0;
  std::size_t width_of_x = 0;  // 0 until the first row fixes it
  double y_sum = 0.0;
  double y_square_sum = 0.0;
  Vector X_transp_Y;
  SymMatrixLower X_transp_X;
};

struct LinRegrResult {
  Vector coef;
  double r2 = 0.0;
  Vector std_err;
  Vector t_stats;
  Vector p_values;
  double condition_no = 1.0;
  std::size_t num_rows = 0;
  std::size_t rank = 0;
  std::size_t dof = 0;
};

void linregr_transition(LinRegrState& state, double y, std::span<const double> x);
void linregr_merge(LinRegrState& into, const LinRegrState& other);
LinRegrResult linregr_final(const LinRegrState& state);

struct LinRegrFold {
  using state_type = LinRegrState;
  using row_type = RowView;
  using result_type = LinRegrResult;

  LinRegrState identity() const { return {}; }
  void transition(LinRegrState& state, const RowView& row) const;
  void merge(LinRegrState& into, const LinRegrState& other) const {
    linregr_merge(into, other);
  }
  LinRegrResult finalize(const LinRegrState& state) const {
    return linregr_final(state);
  }
};

LinRegrResult linregr(const Dataset& data, std::size_t p = 1);

/// Two-sided Student-t tail probability P(|T| >= |t|) with `dof` degrees of
/// freedom. Infinite |t| gives 0.
double student_t_two_sided_p(double t, std::size_t dof);

struct LogRegrState {
  Vector coef_prev;
  SymMatrixLower X_transp_D_X;
  Vector X_transp_D_Z;
  double log_likelihood = 0.0;
  std::size_t num_rows = 0;
};

/// One IRLS pass at a fixed coefficient vector. Labels must be 0 or 1.
class LogRegrStepFold {
 public:
  using state_type = LogRegrState;
  using row_type = RowView;
  using result_type = LogRegrState;

  explicit LogRegrStepFold(Vector coef) : coef_(std::move(coef)) {}

  LogRegrState identity() const;
  void transition(LogRegrState& state, const RowView& row) const;
  void merge(LogRegrState& into, const LogRegrState& other) const;
  LogRegrState finalize(const LogRegrState& state) const { return state; }

 private:
  Vector coef_;
};

struct IrlsStep {
  Vector coef_next;
  double log_likelihood = 0.0;  // at the input coefficients
  std::size_t rank = 0;
};

IrlsStep logregr_irls_step(const Dataset& data, std::span<const double> coef,
                           std::size_t p = 1);

/// sum_i log sigma((2 y_i - 1) <coef, x_i>) as a parallel fold.
double logregr_log_likelihood(const Dataset& data, std::span<const double> coef,
                              std::size_t p = 1);

struct LogRegrOptions {
  double tol = 1e-8;
  std::size_t max_iter = 100;
  std::size_t p = 1;
  LedgerOptions ledger;
};

struct LogRegrResult {
  Vector coef;
  double log_likelihood = 0.0;
  std::size_t num_iterations = 0;
  bool converged = false;
  // False when some iteration lowered the log-likelihood by more than the
  // 1e-12 slack.
  bool monotone = true;
  // Entry m: coefficients after iteration m, diagnostic = log-likelihood at
  // the coefficients that iteration started from.
  IterationLedger<Vector> ledger;
};

/// IRLS from coef = 0 until max |delta coef| < tol. Throws kPerfectSeparation
/// when the iterates run off to infinity.
LogRegrResult logregr_fit(const Dataset& data, const LogRegrOptions& options = {});

}  // namespace madfold
