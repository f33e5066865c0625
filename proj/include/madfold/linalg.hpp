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
#include <span>
#include <string>
#include <vector>

#include "madfold/iterate.hpp"

namespace madfold {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> v);
double norm2(std::span<const double> v);

/// Dense column-major matrix; column j is the contiguous span col(j).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[j * rows_ + i];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[j * rows_ + i];
  }
  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Vector multiply(std::span<const double> v) const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric d x d matrix stored as its packed lower triangle
/// (row i holds entries (i,0)..(i,i)), d(d+1)/2 values.
class SymMatrixLower {
 public:
  SymMatrixLower() = default;
  explicit SymMatrixLower(std::size_t dim)
      : dim_(dim), packed_(dim * (dim + 1) / 2, 0.0) {}

  static SymMatrixLower from_dense_lower(const DenseMatrix& m);

  std::size_t dim() const noexcept { return dim_; }
  static std::size_t index(std::size_t i, std::size_t j) noexcept {
    return i * (i + 1) / 2 + j;
  }
  double operator()(std::size_t i, std::size_t j) const {
    return i >= j ? packed_[index(i, j)] : packed_[index(j, i)];
  }
  double& lower(std::size_t i, std::size_t j) { return packed_[index(i, j)]; }
  std::span<const double> packed() const { return packed_; }

  /// this += weight * x x^T on the lower triangle only.
  void rank_one_update(std::span<const double> x, double weight = 1.0);
  SymMatrixLower& operator+=(const SymMatrixLower& other);

  Vector multiply(std::span<const double> v) const;
  DenseMatrix to_dense() const;

  friend bool operator==(const SymMatrixLower&, const SymMatrixLower&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> packed_;
};

/// Value-returning form of SymMatrixLower::rank_one_update.
SymMatrixLower rank_one_update(SymMatrixLower m, std::span<const double> x);

struct EigenDecomposition {
  Vector eigenvalues;        // ascending
  DenseMatrix eigenvectors;  // column j pairs with eigenvalues[j]
  DenseMatrix pseudo_inverse;
  double condition_no = 1.0;  // +inf when rank < d
  std::size_t rank = 0;
  double rank_tolerance = 0.0;
  std::size_t sweeps = 0;

  bool full_rank() const noexcept { return rank == eigenvalues.size(); }
};

/// Symmetric eigensolver by cyclic Jacobi rotations. Returns eigenvalues
/// ascending with matching orthonormal eigenvector columns; the
/// pseudo-inverse fields are left empty.
EigenDecomposition symmetric_eigen(const SymMatrixLower& m);

/// Eigendecomposition plus Moore-Penrose pseudo-inverse of a PSD matrix.
/// Eigenvalues at or below d * eps * lambda_max count as zero.
EigenDecomposition spd_pseudo_inverse(const SymMatrixLower& m);

struct ClosestColumn {
  std::size_t index = 0;
  double squared_distance = 0.0;
};

/// Column of `m` nearest to `b` in squared Euclidean distance, lowest index
/// on ties.
ClosestColumn closest_column(const DenseMatrix& m, std::span<const double> b);

template <>
struct SnapshotCodec<Vector> {
  static std::string encode(const Vector& v);
  static Vector decode(const std::string& line);
  static std::size_t bytes(const Vector& v) { return v.size() * sizeof(double); }
};

template <>
struct SnapshotCodec<DenseMatrix> {
  static std::string encode(const DenseMatrix& m);
  static DenseMatrix decode(const std::string& line);
  static std::size_t bytes(const DenseMatrix& m) {
    return m.data().size() * sizeof(double);
  }
};

}  // namespace madfold
