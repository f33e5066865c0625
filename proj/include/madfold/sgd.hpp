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

// Stochastic gradient descent over decomposable convex objectives
// f(x) = sum_i f_i(x). Each step applies x <- x - alpha * N * G_i(x) for a
// single term i. Vector objectives read (u, y) from a Dataset row; the
// low-rank recommendation objective reads rows (i, j) -> M_ij with the two
// indices in feature columns 0 and 1 and the rating as the label.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "madfold/dataset.hpp"
#include "madfold/linalg.hpp"

namespace madfold {

enum class ObjectiveKind { kLeastSquares, kLasso, kLogistic, kSvmHinge, kRecommendation };

std::string_view to_string(ObjectiveKind kind);
ObjectiveKind objective_from_string(std::string_view name);

struct Objective {
  ObjectiveKind kind = ObjectiveKind::kLeastSquares;
  double mu = 0.0;        // lasso, recommendation
  std::size_t rank = 1;   // recommendation

  bool is_factorization() const { return kind == ObjectiveKind::kRecommendation; }
  void validate() const;
};

/// Shape facts about a dataset needed by the per-term gradients: the number
/// of terms and, for recommendation, the observation count of every row and
/// column index.
struct SgdProblem {
  std::size_t num_terms = 0;
  std::size_t dim = 0;  // vector objectives
  std::size_t m_rows = 0;
  std::size_t m_cols = 0;
  std::vector<std::size_t> row_counts;
  std::vector<std::size_t> col_counts;

  static SgdProblem from(const Objective& obj, const Dataset& data);
};

struct SgdModel {
  Vector x;       // vector objectives
  DenseMatrix L;  // rank x m_rows, column i is L_i
  DenseMatrix R;  // rank x m_cols, column j is R_j
  std::size_t epoch = 0;
  double alpha0 = 0.0;

  /// Zeros for vector objectives; seeded uniform(-0.5/sqrt(r), 0.5/sqrt(r))
  /// entries for the factors.
  static SgdModel initial(const Objective& obj, const SgdProblem& problem,
                          std::uint64_t seed);
};

/// Gradient of one recommendation term; touches L_i and R_j only.
struct FactorGradient {
  std::size_t i = 0;
  std::size_t j = 0;
  Vector dL;
  Vector dR;
};

using Gradient = std::variant<Vector, FactorGradient>;

/// G_i(x) for the term encoded by `example`. At the hinge and |x| kinks the
/// result is a subgradient (sign(0) = 0, inactive hinge at margin exactly 1).
Gradient term_gradient(const Objective& obj, const SgdModel& model,
                       const SgdProblem& problem, const RowView& example);

/// f_i(x) for one term, including its share of the regularizer.
double term_value(const Objective& obj, const SgdModel& model,
                  const SgdProblem& problem, const RowView& example);

/// model <- model - alpha * N * g. Throws kDivergence on non-finite entries.
void sgd_step(SgdModel& model, const Gradient& g, double alpha, std::size_t N);

/// Exact f(x) = sum of the data terms plus the full regularizer, as a
/// parallel fold.
double objective_value(const Objective& obj, const SgdModel& model,
                       const Dataset& data, std::size_t p = 1);

enum class StepSchedule {
  kPerEpoch,  // alpha_e = alpha0 / e
  kPerStep,   // alpha_t = alpha0 / t over all steps taken so far
};

struct SgdOptions {
  double alpha0 = 0.01;
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  std::size_t p = 1;
  StepSchedule schedule = StepSchedule::kPerEpoch;
};

struct SgdTraceEntry {
  std::size_t epoch = 0;
  double objective = 0.0;
  double step_size = 0.0;  // step size of the epoch's last update
};

struct SgdFit {
  SgdModel model;
  std::vector<SgdTraceEntry> trace;
};

SgdFit sgd_fit(const Dataset& data, const Objective& obj, const SgdOptions& options);

}  // namespace madfold
