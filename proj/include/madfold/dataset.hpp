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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace madfold {

/// One row of a Dataset as seen by a transition function.
struct RowView {
  std::size_t row_id = 0;
  std::span<const double> x;
  std::optional<double> y;
};

/// Immutable table of n rows, each a d-dimensional feature vector plus an
/// optional real label. Features are stored row-major so a row is a
/// contiguous span. All values are finite and d >= 1.
class Dataset {
 public:
  Dataset(std::size_t n_features, std::vector<double> features,
          std::optional<std::vector<double>> labels = std::nullopt,
          std::vector<std::string> feature_names = {});

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_features() const noexcept { return n_features_; }
  bool has_labels() const noexcept { return labels_.has_value(); }

  // RowSource interface used by the fold executor.
  std::size_t size() const noexcept { return n_rows_; }
  RowView row(std::size_t i) const {
    RowView view;
    view.row_id = i;
    view.x = features(i);
    if (labels_) view.y = (*labels_)[i];
    return view;
  }

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * n_features_, n_features_};
  }
  double label(std::size_t i) const { return (*labels_)[i]; }
  std::span<const double> labels() const;
  std::span<const double> feature_data() const { return features_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

  /// Same data with the rows reordered as rows()[order[i]].
  Dataset permuted(std::span<const std::size_t> order) const;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_features_ = 0;
  std::vector<double> features_;
  std::optional<std::vector<double>> labels_;
  std::vector<std::string> feature_names_;
};

/// A column of opaque byte-string items, the row source for sketches.
class ItemColumn {
 public:
  ItemColumn() = default;
  explicit ItemColumn(std::vector<std::string> items)
      : items_(std::move(items)) {}

  std::size_t size() const noexcept { return items_.size(); }
  std::string_view row(std::size_t i) const { return items_[i]; }
  const std::vector<std::string>& items() const { return items_; }

 private:
  std::vector<std::string> items_;
};

}  // namespace madfold
