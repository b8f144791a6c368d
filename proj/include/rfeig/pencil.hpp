// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfeig/common.hpp"
#include "rfeig/dense_matrix.hpp"

namespace rfeig {

/// Compressed sparse row storage.  Column indices are strictly increasing
/// within each row; no duplicate entries.
struct ComplexSparseMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets;  // length n_rows + 1
  std::vector<std::size_t> col_indices;
  std::vector<cd> values;

  std::size_t nnz() const { return values.size(); }

  /// Builds from unordered (row, col, value) triplets; duplicates are summed.
  static ComplexSparseMatrix from_triplets(
      std::size_t n_rows, std::size_t n_cols,
      std::vector<std::tuple<std::size_t, std::size_t, cd>> triplets);

  static ComplexSparseMatrix identity(std::size_t n);
  static ComplexSparseMatrix from_dense(const DenseMatrix& d);

  DenseMatrix to_dense() const;
  ComplexSparseMatrix transpose() const;

  /// Throws if the CSR invariants are violated.
  void validate() const;
};

struct MatrixPencil {
  ComplexSparseMatrix A;
  ComplexSparseMatrix B;

  std::size_t dim() const { return A.n_rows; }
  void validate() const;
};

struct DiskRegion {
  cd center;
  double radius = 1.0;

  bool contains(cd z) const { return std::abs(z - center) < radius; }
};

struct Annulus {
  double inner_radius = 0.0;  // a
  double outer_radius = 0.0;  // b
};

/// Matrix Market coordinate reader.  Accepts real, integer, and complex
/// fields with general/symmetric/hermitian/skew-symmetric symmetry;
/// symmetric-type storage is expanded to full.
ComplexSparseMatrix load_matrix_market(const std::string& path);

/// Coordinate complex general writer, 1-based, entries sorted by (col, row).
void write_matrix_market(const ComplexSparseMatrix& m, const std::string& path);

/// Quasi-2D power-grid circuit pencil of dimension 10*n_x^2 + 20 + 2*n_x^2;
/// eigenvalues are the circuit poles (A = -G conductance part, B = C).
MatrixPencil gen_power_grid(std::size_t n_x, std::uint64_t seed);

struct SpectrumPencil {
  MatrixPencil pencil;
  std::vector<cd> eigenvalues;  // ground truth, inside then outside
};

/// Dense-stored pencil A = X diag(inside, outside) X^{-1}, B = I, with
/// X drawn as a complex Gaussian matrix.
SpectrumPencil gen_spectrum_pencil(const std::vector<cd>& inside,
                                   const std::vector<cd>& outside, std::uint64_t seed);

/// ||A x - B x lambda|| / ((|c| + r) ||B x||).
double relative_residual(const MatrixPencil& pencil, const DiskRegion& region, cd lambda,
                         const std::vector<cd>& x);

std::vector<cd> spmv(const ComplexSparseMatrix& m, const std::vector<cd>& x);
DenseMatrix spmv_block(const ComplexSparseMatrix& m, const DenseMatrix& x);

}  // namespace rfeig
