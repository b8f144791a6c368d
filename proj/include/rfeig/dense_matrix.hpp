// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "rfeig/common.hpp"

namespace rfeig {

/// Column-major complex dense matrix.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cd(0.0, 0.0)) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cd& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const cd& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  cd* col(std::size_t j) { return data_.data() + j * rows_; }
  const cd* col(std::size_t j) const { return data_.data() + j * rows_; }

  std::vector<cd> col_vec(std::size_t j) const {
    return std::vector<cd>(col(j), col(j) + rows_);
  }
  void set_col(std::size_t j, const std::vector<cd>& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  std::vector<cd>& data() { return data_; }
  const std::vector<cd>& data() const { return data_; }

  DenseMatrix adjoint() const;

  /// Keeps the first `k` columns.
  DenseMatrix leading_cols(std::size_t k) const;

  double frobenius_norm() const;
  double max_abs() const;

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cd> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// a^* b without forming the adjoint.
DenseMatrix adjoint_matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& a, cd alpha);

std::vector<cd> matvec(const DenseMatrix& a, const std::vector<cd>& x);

double vec_norm(const std::vector<cd>& v);
cd vec_dot(const std::vector<cd>& a, const std::vector<cd>& b);  // conj(a) . b

}  // namespace rfeig
