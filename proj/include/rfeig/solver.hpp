// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rfeig/common.hpp"
#include "rfeig/dense_eig.hpp"
#include "rfeig/dense_matrix.hpp"
#include "rfeig/factorization.hpp"
#include "rfeig/msgmres.hpp"
#include "rfeig/pencil.hpp"
#include "rfeig/rational.hpp"

namespace rfeig {

struct SolverConfig {
  DiskRegion region;
  std::size_t s_estimate = 0;
  double rho = 1.2;
  std::size_t n_col = 0;  // 0: floor(rho * s_estimate)
  std::size_t k1 = 8;
  std::size_t k2 = 8;
  bool adaptive = false;
  std::size_t k2_max = 512;
  cd sigma;  // projection shift; default c + r*(1.372 + 0.891i)
  bool sigma_set = false;
  double tau = 1e-8;
  double tau_ghost = 1e-2;
  double gmres_tol = 1e-9;
  std::size_t gmres_max_iter = 200;
  std::size_t max_outer = 50;
  std::uint64_t seed = 0;
  int n_threads = 1;

  std::size_t effective_n_col() const {
    return n_col ? n_col : static_cast<std::size_t>(rho * static_cast<double>(s_estimate));
  }
  cd effective_sigma() const {
    return sigma_set ? sigma : region.center + region.radius * cd(1.372, 0.891);
  }
  void validate() const;
};

struct IterationRecord {
  std::size_t t = 0;                     // outer iteration / round, 1-based
  std::size_t p = 0;                     // filtered eigenpair count
  double max_filtered_residual = 0.0;    // max residual among filtered pairs
  std::vector<double> residuals;         // residuals of all finite Ritz pairs
  std::vector<std::size_t> gmres_iters;  // per-column iteration counts
  std::uint64_t gmres_total = 0;
  std::uint64_t cum_columns_applied = 0;  // filter operator column counter
  std::size_t k2 = 0;                     // active outer order (composite modes)
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  std::size_t factorizations = 0;
};

struct EigenReport {
  std::vector<cd> eigenvalues;
  DenseMatrix right_vectors;
  DenseMatrix left_vectors;
  std::vector<double> residuals;
  std::vector<double> left_residuals;
  bool converged = false;
  IterationTrace trace;
};

/// Indices of Ritz pairs inside the region with residual < tau_ghost.
std::vector<std::size_t> ghost_filter(const std::vector<cd>& lambdas,
                                      const std::vector<double>& residuals,
                                      const DiskRegion& region, double tau_ghost);

/// True when p is unchanged across the last `history` records (min 1) and the
/// last max filtered residual is <= tau with p >= 1.
bool check_convergence(const IterationTrace& trace, double tau, std::size_t history = 2);

/// Filter abstraction for the subspace iteration: maps the current basis Y to
/// the filtered block U and may annotate the iteration record.
using FilterFn = std::function<DenseMatrix(const DenseMatrix& y, IterationRecord& rec)>;

/// Two-sided subspace iteration with an arbitrary filter.
EigenReport subspace_iterate(const FilterFn& filter, const MatrixPencil& pencil,
                             const SolverConfig& cfg);

/// Simple quadrature-filter eigensolver (direct solves at k1 poles).
EigenReport solve_simple(const MatrixPencil& pencil, const SolverConfig& cfg);

/// Composite-filter eigensolver with fixed k1, k2 (inner direct solves,
/// outer multi-shift GMRES).
EigenReport solve_fixed_composite(const MatrixPencil& pencil, const SolverConfig& cfg);

/// Composite-filter eigensolver with adaptive k2 doubling and no subspace
/// iteration: Y is filtered once, then the outer order doubles per round on
/// the retained per-column Krylov data.
EigenReport solve_adaptive(const MatrixPencil& pencil, const SolverConfig& cfg);

}  // namespace rfeig
