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

#include "madfold/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "madfold/error.hpp"

namespace madfold {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw_dimension("dot", a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw_dimension("squared_distance", a.size(), b.size());
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector DenseMatrix::multiply(std::span<const double> v) const {
  if (v.size() != cols_) throw_dimension("matrix-vector product", cols_, v.size());
  Vector out(rows_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    const double vj = v[j];
    const double* column = data_.data() + j * rows_;
    for (std::size_t i = 0; i < rows_; ++i) out[i] += column[i] * vj;
  }
  return out;
}

SymMatrixLower SymMatrixLower::from_dense_lower(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw_dimension("square matrix", m.rows(), m.cols());
  SymMatrixLower out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) out.lower(i, j) = m(i, j);
  }
  return out;
}

void SymMatrixLower::rank_one_update(std::span<const double> x, double weight) {
  if (x.size() != dim_) throw_dimension("rank_one_update", dim_, x.size());
  double* row = packed_.data();
  const double* xs = x.data();
  for (std::size_t i = 0; i < dim_; ++i) {
    const double xi = weight * xs[i];
    for (std::size_t j = 0; j <= i; ++j) row[j] += xi * xs[j];
    row += i + 1;
  }
}

SymMatrixLower& SymMatrixLower::operator+=(const SymMatrixLower& other) {
  if (other.dim_ != dim_) throw_dimension("symmetric matrix sum", dim_, other.dim_);
  for (std::size_t i = 0; i < packed_.size(); ++i) packed_[i] += other.packed_[i];
  return *this;
}

Vector SymMatrixLower::multiply(std::span<const double> v) const {
  if (v.size() != dim_) throw_dimension("symmetric matrix-vector product", dim_, v.size());
  Vector out(dim_, 0.0);
  const double* row = packed_.data();
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      out[i] += row[j] * v[j];
      out[j] += row[j] * v[i];
    }
    out[i] += row[i] * v[i];
    row += i + 1;
  }
  return out;
}

DenseMatrix SymMatrixLower::to_dense() const {
  DenseMatrix m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      m(i, j) = packed_[index(i, j)];
      m(j, i) = packed_[index(i, j)];
    }
  }
  return m;
}

SymMatrixLower rank_one_update(SymMatrixLower m, std::span<const double> x) {
  m.rank_one_update(x);
  return m;
}

namespace {

void check_finite(const SymMatrixLower& m) {
  for (double v : m.packed()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kNumeric, "matrix has non-finite entries");
    }
  }
}

constexpr std::size_t kMaxSweeps = 100;

}  // namespace

EigenDecomposition symmetric_eigen(const SymMatrixLower& m) {
  check_finite(m);
  const std::size_t n = m.dim();
  DenseMatrix a = m.to_dense();
  DenseMatrix v = DenseMatrix::identity(n);

  double scale = 0.0;
  for (double x : m.packed()) scale = std::max(scale, std::abs(x));

  std::size_t sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t q = 1; q < n; ++q) {
      for (std::size_t p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    }
    if (off == 0.0 || std::sqrt(off) <= 1e-18 * scale) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Off-diagonal entry already below the resolution of both diagonal
        // entries: drop it rather than rotate.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(app) + g == std::abs(app) &&
            std::abs(aqq) + g == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        auto vp = v.col(p);
        auto vq = v.col(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double x = vp[k];
          const double y = vq[k];
          vp[k] = c * x - s * y;
          vq[k] = s * x + c * y;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i) < a(j, j);
  });

  EigenDecomposition out;
  out.sweeps = sweep;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]);
    auto src = v.col(order[j]);
    std::copy(src.begin(), src.end(), out.eigenvectors.col(j).begin());
  }
  return out;
}

EigenDecomposition spd_pseudo_inverse(const SymMatrixLower& m) {
  EigenDecomposition out = symmetric_eigen(m);
  const std::size_t n = m.dim();
  const double lambda_max =
      n == 0 ? 0.0 : std::max(out.eigenvalues.back(), 0.0);
  const double tol =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * lambda_max;
  out.rank_tolerance = tol;

  double lambda_min_kept = std::numeric_limits<double>::infinity();
  std::vector<double> inv(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double lambda = out.eigenvalues[j];
    if (lambda < -tol) {
      throw Error(ErrorKind::kNotPsd,
                  "matrix is not positive semi-definite (eigenvalue " +
                      std::to_string(lambda) + ")");
    }
    if (lambda > tol) {
      inv[j] = 1.0 / lambda;
      ++out.rank;
      lambda_min_kept = std::min(lambda_min_kept, lambda);
    }
  }

  out.pseudo_inverse = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    if (inv[j] == 0.0) continue;
    auto vj = out.eigenvectors.col(j);
    for (std::size_t c = 0; c < n; ++c) {
      const double w = inv[j] * vj[c];
      auto col = out.pseudo_inverse.col(c);
      for (std::size_t r = 0; r < n; ++r) col[r] += vj[r] * w;
    }
  }
  // Symmetrize exactly.
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = c + 1; r < n; ++r) {
      const double avg = 0.5 * (out.pseudo_inverse(r, c) + out.pseudo_inverse(c, r));
      out.pseudo_inverse(r, c) = avg;
      out.pseudo_inverse(c, r) = avg;
    }
  }

  if (out.rank == n && n > 0) {
    out.condition_no = lambda_max / lambda_min_kept;
  } else {
    out.condition_no = std::numeric_limits<double>::infinity();
  }
  return out;
}

ClosestColumn closest_column(const DenseMatrix& m, std::span<const double> b) {
  if (m.cols() == 0) {
    throw Error(ErrorKind::kArgument, "closest_column needs at least one column");
  }
  if (b.size() != m.rows()) throw_dimension("closest_column", m.rows(), b.size());
  ClosestColumn best{0, std::numeric_limits<double>::infinity()};
  const std::size_t d = m.rows();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double* c = m.col(j).data();
    double dist = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = b[i] - c[i];
      dist += diff * diff;
    }
    if (dist < best.squared_distance) best = {j, dist};
  }
  return best;
}

std::string SnapshotCodec<Vector>::encode(const Vector& v) {
  return nlohmann::json(v).dump();
}

Vector SnapshotCodec<Vector>::decode(const std::string& line) {
  return nlohmann::json::parse(line).get<Vector>();
}

std::string SnapshotCodec<DenseMatrix>::encode(const DenseMatrix& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data().begin(), m.data().end());
  return j.dump();
}

DenseMatrix SnapshotCodec<DenseMatrix>::decode(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  DenseMatrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.data().size()) {
    throw Error(ErrorKind::kParse, "matrix snapshot has wrong element count");
  }
  std::copy(data.begin(), data.end(), m.data().begin());
  return m;
}

}  // namespace madfold
