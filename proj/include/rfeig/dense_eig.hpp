// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rfeig/common.hpp"
#include "rfeig/dense_matrix.hpp"

namespace rfeig {

/// P_L^* A P_R = H_A, P_L^* B P_R = H_B with H_A, H_B upper triangular and
/// P_L, P_R unitary.  Eigenvalues are alphas[i]/betas[i]; betas[i] == 0
/// marks an infinite eigenvalue.
struct GeneralizedSchur {
  DenseMatrix H_A, H_B;
  DenseMatrix P_L, P_R;
  std::vector<cd> alphas, betas;
};

/// Orthonormal basis of the numerical column space of Y via column-pivoted
/// Householder QR; rank cut at |r_jj| > rank_tol * |r_11|.
DenseMatrix orth(const DenseMatrix& y, double rank_tol = 1e-12);

/// Q^* A Z = H upper Hessenberg, Q^* B Z = T upper triangular.
void hessenberg_triangular(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& h,
                           DenseMatrix& t, DenseMatrix& q, DenseMatrix& z);

/// Complex single-shift QZ iteration to generalized Schur form.
/// Throws NumericalError after 30 n sweeps without convergence.
GeneralizedSchur qz(const DenseMatrix& a, const DenseMatrix& b);

/// Right and left eigenvector matrices of the triangular pencil
/// (H_A, H_B): columns satisfy (beta_i H_A - alpha_i H_B) v_i = 0 and
/// w_i^* (beta_i H_A - alpha_i H_B) = 0, unit-normalized.
void triangular_eigvecs(const GeneralizedSchur& s, DenseMatrix& v_l, DenseMatrix& v_r);

struct ReducedEigResult {
  std::vector<cd> lambdas;  // alphas[i]/betas[i]; infinite marked by beta
  std::vector<cd> alphas, betas;
  DenseMatrix V_L, V_R;  // full-pencil eigenvectors P_L v_l, P_R v_r
  GeneralizedSchur schur;
};

/// Full small dense generalized eigensolve of (M_A, M_B).
ReducedEigResult reduced_solve(const DenseMatrix& m_a, const DenseMatrix& m_b);

}  // namespace rfeig
