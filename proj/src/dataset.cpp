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

#include "madfold/dataset.hpp"

#include <cmath>

#include "madfold/error.hpp"

namespace madfold {

Dataset::Dataset(std::size_t n_features, std::vector<double> features,
                 std::optional<std::vector<double>> labels,
                 std::vector<std::string> feature_names)
    : n_features_(n_features),
      features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)) {
  if (n_features_ == 0) {
    throw Error(ErrorKind::kArgument, "dataset needs at least one feature");
  }
  if (features_.size() % n_features_ != 0) {
    throw Error(ErrorKind::kDimension,
                "feature buffer of " + std::to_string(features_.size()) +
                    " values is not a multiple of d=" +
                    std::to_string(n_features_));
  }
  n_rows_ = features_.size() / n_features_;
  if (labels_ && labels_->size() != n_rows_) {
    throw_dimension("label vector length", n_rows_, labels_->size());
  }
  if (!feature_names_.empty() && feature_names_.size() != n_features_) {
    throw_dimension("feature name count", n_features_, feature_names_.size());
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!std::isfinite(features_[i])) {
      throw Error(ErrorKind::kNumeric,
                  "non-finite feature at row " +
                      std::to_string(i / n_features_) + ", column " +
                      std::to_string(i % n_features_));
    }
  }
  if (labels_) {
    for (std::size_t i = 0; i < n_rows_; ++i) {
      if (!std::isfinite((*labels_)[i])) {
        throw Error(ErrorKind::kNumeric,
                    "non-finite label at row " + std::to_string(i));
      }
    }
  }
}

std::span<const double> Dataset::labels() const {
  if (!labels_) return {};
  return *labels_;
}

Dataset Dataset::permuted(std::span<const std::size_t> order) const {
  if (order.size() != n_rows_) {
    throw_dimension("permutation length", n_rows_, order.size());
  }
  std::vector<double> features;
  features.reserve(features_.size());
  std::optional<std::vector<double>> labels;
  if (labels_) labels.emplace().reserve(n_rows_);
  for (std::size_t src : order) {
    auto row = this->features(src);
    features.insert(features.end(), row.begin(), row.end());
    if (labels) labels->push_back((*labels_)[src]);
  }
  return Dataset(n_features_, std::move(features), std::move(labels),
                 feature_names_);
}

}  // namespace madfold
