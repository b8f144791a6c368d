// SPDX-License-Identifier: Apache-2.0
#include "rfeig/factorization.hpp"

#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace rfeig {

namespace {

constexpr std::size_t kDenseCutoff = 500;

using ESp = Eigen::SparseMatrix<cd>;
using EDn = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>;
using EVec = Eigen::Matrix<cd, Eigen::Dynamic, 1>;

ESp shifted_sparse(const MatrixPencil& pencil, cd pole) {
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(pencil.A.nnz() + pencil.B.nnz());
  for (std::size_t i = 0; i < pencil.A.n_rows; ++i)
    for (std::size_t k = pencil.A.row_offsets[i]; k < pencil.A.row_offsets[i + 1]; ++k)
      trip.emplace_back(static_cast<int>(i), static_cast<int>(pencil.A.col_indices[k]),
                        -pencil.A.values[k]);
  for (std::size_t i = 0; i < pencil.B.n_rows; ++i)
    for (std::size_t k = pencil.B.row_offsets[i]; k < pencil.B.row_offsets[i + 1]; ++k)
      trip.emplace_back(static_cast<int>(i), static_cast<int>(pencil.B.col_indices[k]),
                        pole * pencil.B.values[k]);
  ESp m(static_cast<Eigen::Index>(pencil.dim()), static_cast<Eigen::Index>(pencil.dim()));
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace

struct ShiftedFactor::Impl {
  std::unique_ptr<Eigen::SparseLU<ESp>> sparse;
  std::unique_ptr<Eigen::PartialPivLU<EDn>> dense;
};

ShiftedFactor::ShiftedFactor() : impl_(new Impl) {}
ShiftedFactor::ShiftedFactor(ShiftedFactor&&) noexcept = default;
ShiftedFactor& ShiftedFactor::operator=(ShiftedFactor&&) noexcept = default;
ShiftedFactor::~ShiftedFactor() = default;

ShiftedFactor factorize_shifted(const MatrixPencil& pencil, cd pole) {
  ShiftedFactor f;
  f.shift_ = pole;
  f.dim_ = pencil.dim();
  auto fail = [&]() {
    std::ostringstream os;
    os << "factorize_shifted: singular system at pole (" << pole.real() << ", " << pole.imag()
       << ")";
    throw NumericalError(os.str());
  };
  if (pencil.dim() >= kDenseCutoff) {
    f.impl_->sparse = std::make_unique<Eigen::SparseLU<ESp>>();
    ESp k = shifted_sparse(pencil, pole);
    f.impl_->sparse->compute(k);
    if (f.impl_->sparse->info() != Eigen::Success) fail();
  } else {
    EDn k(static_cast<Eigen::Index>(pencil.dim()), static_cast<Eigen::Index>(pencil.dim()));
    k.setZero();
    DenseMatrix kd = pencil.B.to_dense();
    DenseMatrix ad = pencil.A.to_dense();
    for (std::size_t j = 0; j < pencil.dim(); ++j)
      for (std::size_t i = 0; i < pencil.dim(); ++i)
        k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            pole * kd(i, j) - ad(i, j);
    f.impl_->dense = std::make_unique<Eigen::PartialPivLU<EDn>>(k);
    const auto& lu = f.impl_->dense->matrixLU();
    double dmin = 1e300, dmax = 0.0;
    for (Eigen::Index i = 0; i < lu.rows(); ++i) {
      double d = std::abs(lu(i, i));
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    if (dmax == 0.0 || dmin < 1e-300 * dmax) fail();
  }
  return f;
}

void ShiftedFactor::solve_inplace(const cd* rhs, cd* x) const {
  Eigen::Map<const EVec> b(rhs, static_cast<Eigen::Index>(dim_));
  Eigen::Map<EVec> xo(x, static_cast<Eigen::Index>(dim_));
  if (impl_->sparse)
    xo = impl_->sparse->solve(b);
  else
    xo = impl_->dense->solve(b);
}

std::vector<cd> ShiftedFactor::solve(const std::vector<cd>& rhs) const {
  if (rhs.size() != dim_) throw DimensionError("ShiftedFactor::solve: size mismatch");
  std::vector<cd> x(dim_);
  solve_inplace(rhs.data(), x.data());
  return x;
}

DenseMatrix ShiftedFactor::solve(const DenseMatrix& rhs) const {
  if (rhs.rows() != dim_) throw DimensionError("ShiftedFactor::solve: size mismatch");
  DenseMatrix x(dim_, rhs.cols());
  for (std::size_t j = 0; j < rhs.cols(); ++j) solve_inplace(rhs.col(j), x.col(j));
  return x;
}

InnerFilterOperator::InnerFilterOperator(const MatrixPencil& pencil, const PolesWeights& pw,
                                         int n_threads)
    : dim_(pencil.dim()), b_(pencil.B), weights_(pw.weights), n_threads_(n_threads) {
  factors_.reserve(pw.k);
  for (std::size_t i = 0; i < pw.k; ++i)
    factors_.push_back(factorize_shifted(pencil, pw.poles[i]));
}

void InnerFilterOperator::apply_columns(const DenseMatrix& by, DenseMatrix& out, std::size_t j0,
                                        std::size_t j1) const {
  std::vector<cd> tmp(dim_);
  for (std::size_t j = j0; j < j1; ++j) {
    cd* oc = out.col(j);
    for (std::size_t i = 0; i < dim_; ++i) oc[i] = cd(0.0, 0.0);
    // fixed ascending pole order for reproducible summation
    for (std::size_t p = 0; p < factors_.size(); ++p) {
      factors_[p].solve_inplace(by.col(j), tmp.data());
      const cd w = weights_[p];
      for (std::size_t i = 0; i < dim_; ++i) oc[i] += w * tmp[i];
    }
  }
}

DenseMatrix InnerFilterOperator::apply_block(const DenseMatrix& y) const {
  if (y.rows() != dim_) throw DimensionError("InnerFilterOperator: dimension mismatch");
  DenseMatrix by = spmv_block(b_, y);
  DenseMatrix out(dim_, y.cols());
  const std::size_t nc = y.cols();
  if (n_threads_ <= 1 || nc <= 1) {
    apply_columns(by, out, 0, nc);
  } else {
    std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(n_threads_), nc);
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < nt; ++t) {
      std::size_t j0 = nc * t / nt, j1 = nc * (t + 1) / nt;
      workers.emplace_back([&, j0, j1] { apply_columns(by, out, j0, j1); });
    }
    for (auto& w : workers) w.join();
  }
  apply_count_.fetch_add(1);
  column_count_.fetch_add(nc);
  return out;
}

void InnerFilterOperator::apply(const cd* x, cd* y) const {
  DenseMatrix in(dim_, 1);
  for (std::size_t i = 0; i < dim_; ++i) in(i, 0) = x[i];
  DenseMatrix by = spmv_block(b_, in);
  DenseMatrix out(dim_, 1);
  apply_columns(by, out, 0, 1);
  for (std::size_t i = 0; i < dim_; ++i) y[i] = out(i, 0);
  apply_count_.fetch_add(1);
  column_count_.fetch_add(1);
}

std::unique_ptr<InnerFilterOperator> build_inner_operator(const MatrixPencil& pencil,
                                                          const PolesWeights& pw, int n_threads) {
  return std::make_unique<InnerFilterOperator>(pencil, pw, n_threads);
}

DenseMatrix apply_simple_filter(const MatrixPencil& pencil, const PolesWeights& pw,
                                const DenseMatrix& y, int n_threads) {
  InnerFilterOperator op(pencil, pw, n_threads);
  return op.apply_block(y);
}

}  // namespace rfeig
