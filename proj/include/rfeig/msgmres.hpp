// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rfeig/common.hpp"
#include "rfeig/operator.hpp"
#include "rfeig/rational.hpp"

namespace rfeig {

/// Shared Arnoldi data for one right-hand side: orthonormal basis V,
/// Hessenberg columns H, and the operator-application counter.
struct KrylovWorkspace {
  std::size_t dim = 0;
  std::vector<std::vector<cd>> v;       // n+1 basis vectors of length dim
  std::vector<std::vector<cd>> h_cols;  // column j holds H(0..j+1, j)
  double beta = 0.0;                    // ||b||
  std::size_t n = 0;                    // completed Arnoldi steps
  bool breakdown = false;
  std::uint64_t op_applications = 0;
  double h_norm = 0.0;  // running Frobenius norm of H
};

struct ShiftSolution {
  cd shift;
  std::vector<cd> x;
  double residual = 0.0;  // relative to ||b||
  std::size_t iterations = 0;
  bool converged = false;
};

struct ShiftedSolveResult {
  std::vector<ShiftSolution> solutions;
  std::uint64_t op_applications = 0;
};

/// GMRES on (G - s I) x = b for many shifts s over one shared Krylov basis.
/// Each shift keeps an incrementally updated Givens least-squares state;
/// converged shifts freeze their solutions.  New shifts can be added later
/// and replay the stored basis without further operator applications.
class MultiShiftGmres {
public:
  MultiShiftGmres(const MatVecOperator& g, std::vector<cd> b, double tol = 1e-9,
                  std::size_t max_iter = 200);

  /// Registers shifts (replaying any existing basis) and returns their indices.
  std::vector<std::size_t> add_shifts(const std::vector<cd>& shifts);

  /// Grows the basis until every registered shift converges or max_iter.
  void run();

  std::size_t n_shifts() const { return states_.size(); }
  ShiftSolution shift_result(std::size_t idx) const;
  const KrylovWorkspace& workspace() const { return ws_; }
  std::uint64_t op_applications() const { return ws_.op_applications; }

  /// One Arnoldi step; returns false on breakdown or max_iter.
  bool arnoldi_step();

private:
  struct ShiftState {
    cd shift;
    std::vector<double> giv_c;
    std::vector<cd> giv_s;
    std::vector<std::vector<cd>> r_cols;  // triangular factor columns
    std::vector<cd> g;                    // rotated beta*e1, length n+1
    std::vector<cd> frozen_x;
    double residual = 1.0;
    std::size_t iterations = 0;
    bool converged = false;
  };

  void process_column(ShiftState& st, std::size_t j) const;
  std::vector<cd> dense_solution(const ShiftState& st, std::size_t nn) const;

  const MatVecOperator& g_;
  std::vector<cd> b_;
  double tol_;
  std::size_t max_iter_;
  KrylovWorkspace ws_;
  std::vector<ShiftState> states_;
};

/// One-shot convenience wrapper over MultiShiftGmres.
ShiftedSolveResult solve_all_shifts(const MatVecOperator& g, const std::vector<cd>& b,
                                    const std::vector<cd>& shifts, double tol = 1e-9,
                                    std::size_t max_iter = 200);

/// U = sum_j coeffs.weights[j] * solutions[j] + coeffs.direct_term * gb.
std::vector<cd> combine_solutions(const std::vector<std::vector<cd>>& solutions,
                                  const CompositeCoeffs& coeffs, const std::vector<cd>& gb);

}  // namespace rfeig
