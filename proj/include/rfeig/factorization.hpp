// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <memory>
#include <vector>

#include "rfeig/common.hpp"
#include "rfeig/dense_matrix.hpp"
#include "rfeig/operator.hpp"
#include "rfeig/pencil.hpp"
#include "rfeig/rational.hpp"

namespace rfeig {

/// LU factorization of the shifted matrix K = p B - A, ready for repeated
/// solves.  Sparse LU for large systems, dense LU below dimension 500.
class ShiftedFactor {
public:
  ShiftedFactor(ShiftedFactor&&) noexcept;
  ShiftedFactor& operator=(ShiftedFactor&&) noexcept;
  ~ShiftedFactor();

  cd shift() const { return shift_; }
  std::size_t dim() const { return dim_; }

  std::vector<cd> solve(const std::vector<cd>& rhs) const;
  DenseMatrix solve(const DenseMatrix& rhs) const;
  void solve_inplace(const cd* rhs, cd* x) const;

private:
  friend ShiftedFactor factorize_shifted(const MatrixPencil&, cd);
  ShiftedFactor();

  cd shift_;
  std::size_t dim_ = 0;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Factorizes p B - A.  Throws NumericalError on singularity, naming the pole.
ShiftedFactor factorize_shifted(const MatrixPencil& pencil, cd pole);

/// G(Y) = sum_i w_i K_i^{-1} B Y: the quadrature filter as an operator.
/// apply_count counts block applications; column_count counts total columns
/// pushed through the operator.
class InnerFilterOperator : public MatVecOperator {
public:
  InnerFilterOperator(const MatrixPencil& pencil, const PolesWeights& pw, int n_threads = 1);

  std::size_t dim() const override { return dim_; }
  void apply(const cd* x, cd* y) const override;

  DenseMatrix apply_block(const DenseMatrix& y) const;

  std::size_t k1() const { return factors_.size(); }
  std::uint64_t apply_count() const { return apply_count_.load(); }
  std::uint64_t column_count() const { return column_count_.load(); }
  void reset_counters() {
    apply_count_.store(0);
    column_count_.store(0);
  }

private:
  void apply_columns(const DenseMatrix& by, DenseMatrix& out, std::size_t j0,
                     std::size_t j1) const;

  std::size_t dim_;
  const ComplexSparseMatrix b_;
  std::vector<ShiftedFactor> factors_;
  std::vector<cd> weights_;
  int n_threads_;
  mutable std::atomic<std::uint64_t> apply_count_{0};
  mutable std::atomic<std::uint64_t> column_count_{0};
};

std::unique_ptr<InnerFilterOperator> build_inner_operator(const MatrixPencil& pencil,
                                                          const PolesWeights& pw,
                                                          int n_threads = 1);

/// One-shot filter application sum_i w_i (p_i B - A)^{-1} B Y.
DenseMatrix apply_simple_filter(const MatrixPencil& pencil, const PolesWeights& pw,
                                const DenseMatrix& y, int n_threads = 1);

}  // namespace rfeig
