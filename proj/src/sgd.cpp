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

#include "madfold/sgd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "madfold/error.hpp"
#include "madfold/fold.hpp"
#include "madfold/hash.hpp"

namespace madfold {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// log(1 + exp(-m)) without overflow.
double logistic_loss(double margin) {
  return margin >= 0.0 ? std::log1p(std::exp(-margin))
                       : -margin + std::log1p(std::exp(margin));
}

// sigma(-m) = 1 / (1 + exp(m))
double sigmoid_neg(double margin) {
  if (margin >= 0.0) {
    const double e = std::exp(-margin);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(margin));
}

double require_label(const RowView& row) {
  if (!row.y) throw Error(ErrorKind::kData, "objective needs a label column");
  return *row.y;
}

double signed_label(const RowView& row) {
  const double y = require_label(row);
  if (y != 1.0 && y != -1.0) {
    throw Error(ErrorKind::kData, "label at row " + std::to_string(row.row_id) +
                                      " is " + std::to_string(y) +
                                      ", expected -1 or +1");
  }
  return y;
}

std::size_t factor_index(double v, std::size_t bound, const char* what,
                         std::size_t row_id) {
  if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(bound)) {
    throw Error(ErrorKind::kData, std::string(what) + " index " + std::to_string(v) +
                                      " at row " + std::to_string(row_id) +
                                      " is out of range");
  }
  return static_cast<std::size_t>(v);
}

void require_vector_shape(const SgdModel& model, const RowView& row) {
  if (row.x.size() != model.x.size()) {
    throw_dimension("sgd example", model.x.size(), row.x.size());
  }
}

}  // namespace

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kLeastSquares: return "least_squares";
    case ObjectiveKind::kLasso: return "lasso";
    case ObjectiveKind::kLogistic: return "logistic";
    case ObjectiveKind::kSvmHinge: return "hinge";
    case ObjectiveKind::kRecommendation: return "recommendation";
  }
  return "unknown";
}

ObjectiveKind objective_from_string(std::string_view name) {
  for (auto kind : {ObjectiveKind::kLeastSquares, ObjectiveKind::kLasso,
                    ObjectiveKind::kLogistic, ObjectiveKind::kSvmHinge,
                    ObjectiveKind::kRecommendation}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::kArgument, "unknown objective '" + std::string(name) + "'");
}

void Objective::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorKind::kArgument, "mu must be a finite value >= 0");
  }
  if (kind == ObjectiveKind::kRecommendation && rank < 1) {
    throw Error(ErrorKind::kArgument, "recommendation rank must be >= 1");
  }
}

SgdProblem SgdProblem::from(const Objective& obj, const Dataset& data) {
  obj.validate();
  if (!data.has_labels()) {
    throw Error(ErrorKind::kData, "objective needs a label column");
  }
  SgdProblem problem;
  problem.num_terms = data.n_rows();
  problem.dim = data.n_features();
  if (!obj.is_factorization()) {
    if (obj.kind == ObjectiveKind::kLogistic || obj.kind == ObjectiveKind::kSvmHinge) {
      for (std::size_t i = 0; i < data.n_rows(); ++i) signed_label(data.row(i));
    }
    return problem;
  }
  if (data.n_features() != 2) {
    throw_dimension("recommendation example (row index, column index)", 2,
                    data.n_features());
  }
  const auto unbounded = std::numeric_limits<std::size_t>::max();
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    auto x = data.features(r);
    problem.m_rows = std::max(problem.m_rows, factor_index(x[0], unbounded, "row", r) + 1);
    problem.m_cols = std::max(problem.m_cols, factor_index(x[1], unbounded, "column", r) + 1);
  }
  problem.row_counts.assign(problem.m_rows, 0);
  problem.col_counts.assign(problem.m_cols, 0);
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    auto x = data.features(r);
    problem.row_counts[static_cast<std::size_t>(x[0])]++;
    problem.col_counts[static_cast<std::size_t>(x[1])]++;
  }
  return problem;
}

SgdModel SgdModel::initial(const Objective& obj, const SgdProblem& problem,
                           std::uint64_t seed) {
  SgdModel model;
  if (!obj.is_factorization()) {
    model.x.assign(problem.dim, 0.0);
    return model;
  }
  model.L = DenseMatrix(obj.rank, problem.m_rows);
  model.R = DenseMatrix(obj.rank, problem.m_cols);
  const double half_width = 0.5 / std::sqrt(static_cast<double>(obj.rank));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-half_width, half_width);
  for (double& v : model.L.data()) v = uniform(rng);
  for (double& v : model.R.data()) v = uniform(rng);
  return model;
}

Gradient term_gradient(const Objective& obj, const SgdModel& model,
                       const SgdProblem& problem, const RowView& example) {
  const double n_terms = static_cast<double>(problem.num_terms);
  switch (obj.kind) {
    case ObjectiveKind::kLeastSquares:
    case ObjectiveKind::kLasso: {
      require_vector_shape(model, example);
      const double residual = dot(model.x, example.x) - require_label(example);
      Vector g(example.x.size());
      for (std::size_t k = 0; k < g.size(); ++k) g[k] = 2.0 * residual * example.x[k];
      if (obj.kind == ObjectiveKind::kLasso) {
        for (std::size_t k = 0; k < g.size(); ++k) {
          g[k] += obj.mu / n_terms * sign(model.x[k]);
        }
      }
      return g;
    }
    case ObjectiveKind::kLogistic: {
      require_vector_shape(model, example);
      const double y = signed_label(example);
      const double scale = -y * sigmoid_neg(y * dot(model.x, example.x));
      Vector g(example.x.size());
      for (std::size_t k = 0; k < g.size(); ++k) g[k] = scale * example.x[k];
      return g;
    }
    case ObjectiveKind::kSvmHinge: {
      require_vector_shape(model, example);
      const double y = signed_label(example);
      Vector g(example.x.size(), 0.0);
      if (1.0 - y * dot(model.x, example.x) > 0.0) {
        for (std::size_t k = 0; k < g.size(); ++k) g[k] = -y * example.x[k];
      }
      return g;
    }
    case ObjectiveKind::kRecommendation: {
      if (example.x.size() != 2) throw_dimension("recommendation example", 2, example.x.size());
      FactorGradient g;
      g.i = factor_index(example.x[0], problem.m_rows, "row", example.row_id);
      g.j = factor_index(example.x[1], problem.m_cols, "column", example.row_id);
      auto li = model.L.col(g.i);
      auto rj = model.R.col(g.j);
      const double residual = dot(li, rj) - require_label(example);
      const double reg_i = 2.0 * obj.mu / static_cast<double>(problem.row_counts[g.i]);
      const double reg_j = 2.0 * obj.mu / static_cast<double>(problem.col_counts[g.j]);
      g.dL.resize(li.size());
      g.dR.resize(rj.size());
      for (std::size_t r = 0; r < li.size(); ++r) {
        g.dL[r] = 2.0 * residual * rj[r] + reg_i * li[r];
        g.dR[r] = 2.0 * residual * li[r] + reg_j * rj[r];
      }
      return g;
    }
  }
  throw Error(ErrorKind::kArgument, "unknown objective");
}

double term_value(const Objective& obj, const SgdModel& model,
                  const SgdProblem& problem, const RowView& example) {
  switch (obj.kind) {
    case ObjectiveKind::kLeastSquares:
    case ObjectiveKind::kLasso: {
      require_vector_shape(model, example);
      const double residual = dot(model.x, example.x) - require_label(example);
      double value = residual * residual;
      if (obj.kind == ObjectiveKind::kLasso) {
        double l1 = 0.0;
        for (double v : model.x) l1 += std::abs(v);
        value += obj.mu / static_cast<double>(problem.num_terms) * l1;
      }
      return value;
    }
    case ObjectiveKind::kLogistic:
      require_vector_shape(model, example);
      return logistic_loss(signed_label(example) * dot(model.x, example.x));
    case ObjectiveKind::kSvmHinge:
      require_vector_shape(model, example);
      return std::max(0.0, 1.0 - signed_label(example) * dot(model.x, example.x));
    case ObjectiveKind::kRecommendation: {
      const std::size_t i = factor_index(example.x[0], problem.m_rows, "row", example.row_id);
      const std::size_t j = factor_index(example.x[1], problem.m_cols, "column", example.row_id);
      auto li = model.L.col(i);
      auto rj = model.R.col(j);
      const double residual = dot(li, rj) - require_label(example);
      return residual * residual +
             obj.mu / static_cast<double>(problem.row_counts[i]) * dot(li, li) +
             obj.mu / static_cast<double>(problem.col_counts[j]) * dot(rj, rj);
    }
  }
  throw Error(ErrorKind::kArgument, "unknown objective");
}

void sgd_step(SgdModel& model, const Gradient& g, double alpha, std::size_t N) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::kArgument, "step size must be > 0");
  if (N < 1) throw Error(ErrorKind::kArgument, "term count N must be >= 1");
  const double scale = alpha * static_cast<double>(N);
  bool finite = true;
  auto apply = [&](std::span<double> target, const Vector& grad) {
    if (target.size() != grad.size()) throw_dimension("sgd step", target.size(), grad.size());
    for (std::size_t k = 0; k < target.size(); ++k) {
      target[k] -= scale * grad[k];
      finite = finite && std::isfinite(target[k]);
    }
  };
  if (const auto* dense = std::get_if<Vector>(&g)) {
    apply(model.x, *dense);
  } else {
    const auto& factors = std::get<FactorGradient>(g);
    apply(model.L.col(factors.i), factors.dL);
    apply(model.R.col(factors.j), factors.dR);
  }
  if (!finite) {
    std::ostringstream msg;
    msg << "SGD diverged in epoch " << model.epoch << " with step size " << alpha
        << "; try a smaller alpha0";
    throw Error(ErrorKind::kDivergence, msg.str());
  }
}

double objective_value(const Objective& obj, const SgdModel& model,
                       const Dataset& data, std::size_t p) {
  const SgdProblem problem = SgdProblem::from(obj, data);
  if (!obj.is_factorization() && model.x.size() != data.n_features()) {
    throw_dimension("model", data.n_features(), model.x.size());
  }
  if (obj.is_factorization() &&
      (model.L.cols() < problem.m_rows || model.R.cols() < problem.m_cols)) {
    throw Error(ErrorKind::kDimension, "factor matrices smaller than the index range");
  }
  // Per-term losses only; the regularizer is added once, whole, below.
  Objective loss_only = obj;
  loss_only.mu = 0.0;
  auto fold = make_fold<RowView>(
      0.0,
      [&](double& sum, const RowView& row) {
        sum += term_value(loss_only, model, problem, row);
      },
      [](double& into, const double& other) { into += other; },
      [](const double& sum) { return sum; });
  double value = run_parallel(fold, data, p);
  if (obj.kind == ObjectiveKind::kLasso) {
    double l1 = 0.0;
    for (double v : model.x) l1 += std::abs(v);
    value += obj.mu * l1;
  } else if (obj.kind == ObjectiveKind::kRecommendation) {
    const double frob = dot(model.L.data(), model.L.data()) + dot(model.R.data(), model.R.data());
    value += obj.mu * frob;
  }
  return value;
}

SgdFit sgd_fit(const Dataset& data, const Objective& obj, const SgdOptions& options) {
  if (options.epochs < 1) throw Error(ErrorKind::kArgument, "epochs must be >= 1");
  if (!(options.alpha0 > 0.0)) throw Error(ErrorKind::kArgument, "alpha0 must be > 0");
  if (data.n_rows() == 0) throw Error(ErrorKind::kEmptyInput, "SGD over zero rows");
  const SgdProblem problem = SgdProblem::from(obj, data);

  SgdFit fit;
  fit.model = SgdModel::initial(obj, problem, options.seed);
  fit.model.alpha0 = options.alpha0;

  std::vector<std::size_t> order(data.n_rows());
  std::iota(order.begin(), order.end(), 0);
  // Separate stream from the factor initialization.
  std::mt19937_64 rng(mix64(options.seed));
  std::size_t steps = 0;
  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    fit.model.epoch = epoch;
    std::shuffle(order.begin(), order.end(), rng);
    double alpha = options.alpha0 / static_cast<double>(epoch);
    for (std::size_t idx : order) {
      if (options.schedule == StepSchedule::kPerStep) {
        alpha = options.alpha0 / static_cast<double>(++steps);
      }
      const RowView row = data.row(idx);
      sgd_step(fit.model, term_gradient(obj, fit.model, problem, row), alpha,
               problem.num_terms);
    }
    fit.trace.push_back({epoch, objective_value(obj, fit.model, data, options.p), alpha});
  }
  return fit;
}

}  // namespace madfold
