// SPDX-License-Identifier: Apache-2.0
#include "rfeig/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

namespace rfeig {

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) out(j, i) = std::conj((*this)(i, j));
  return out;
}

DenseMatrix DenseMatrix::leading_cols(std::size_t k) const {
  DenseMatrix out(rows_, k);
  std::copy(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(k * rows_),
            out.data().begin());
  return out;
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cd& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (const cd& v : data_) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cd bkj = b(k, j);
      if (bkj == cd(0.0, 0.0)) continue;
      const cd* acol = a.col(k);
      cd* ocol = out.col(j);
      for (std::size_t i = 0; i < a.rows(); ++i) ocol[i] += acol[i] * bkj;
    }
  return out;
}

DenseMatrix adjoint_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("adjoint_matmul: row dimensions differ");
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) {
      cd s(0.0, 0.0);
      const cd* acol = a.col(i);
      const cd* bcol = b.col(j);
      for (std::size_t r = 0; r < a.rows(); ++r) s += std::conj(acol[r]) * bcol[r];
      out(i, j) = s;
    }
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("matrix subtraction: shape mismatch");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("matrix addition: shape mismatch");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

DenseMatrix scale(const DenseMatrix& a, cd alpha) {
  DenseMatrix out = a;
  for (cd& v : out.data()) v *= alpha;
  return out;
}

std::vector<cd> matvec(const DenseMatrix& a, const std::vector<cd>& x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: dimension mismatch");
  std::vector<cd> y(a.rows(), cd(0.0, 0.0));
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const cd xj = x[j];
    const cd* acol = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += acol[i] * xj;
  }
  return y;
}

double vec_norm(const std::vector<cd>& v) {
  double s = 0.0;
  for (const cd& x : v) s += std::norm(x);
  return std::sqrt(s);
}

cd vec_dot(const std::vector<cd>& a, const std::vector<cd>& b) {
  cd s(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace rfeig
