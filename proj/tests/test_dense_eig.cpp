// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rfeig/dense_eig.hpp"
#include "rfeig/rng.hpp"

using namespace rfeig;

namespace {

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  CounterRng rng(seed);
  DenseMatrix m(rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = rng.gaussian_complex();
  return m;
}

double max_offdiag_identity_error(const DenseMatrix& v) {
  DenseMatrix g = adjoint_matmul(v, v);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? cd(1, 0) : cd(0, 0))));
  return worst;
}

double strict_lower_max(const DenseMatrix& m) {
  double worst = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = j + 1; i < m.rows(); ++i) worst = std::max(worst, std::abs(m(i, j)));
  return worst;
}

void check_schur(const DenseMatrix& a, const DenseMatrix& b, const GeneralizedSchur& s) {
  double na = std::max(a.frobenius_norm(), 1e-300);
  double nb = std::max(b.frobenius_norm(), 1e-300);
  DenseMatrix ra = matmul(adjoint_matmul(s.P_L, a), s.P_R) - s.H_A;
  DenseMatrix rb = matmul(adjoint_matmul(s.P_L, b), s.P_R) - s.H_B;
  CHECK(ra.frobenius_norm() < 1e-10 * na);
  CHECK(rb.frobenius_norm() < 1e-10 * nb);
  CHECK(strict_lower_max(s.H_A) < 1e-12 * na);
  CHECK(strict_lower_max(s.H_B) < 1e-12 * nb);
  CHECK(max_offdiag_identity_error(s.P_L) < 1e-12);
  CHECK(max_offdiag_identity_error(s.P_R) < 1e-12);
}

}  // namespace

TEST_CASE("orth basics") {
  auto vi = orth(DenseMatrix::identity(4));
  CHECK(vi.cols() == 4);
  CHECK(max_offdiag_identity_error(vi) < 1e-12);

  DenseMatrix two(5, 2);
  auto v = random_matrix(5, 1, 1);
  for (std::size_t r = 0; r < 5; ++r) {
    two(r, 0) = v(r, 0);
    two(r, 1) = 2.0 * v(r, 0);
  }
  CHECK(orth(two).cols() == 1);
  CHECK_THROWS(orth(DenseMatrix(3, 2)));
}

TEST_CASE("orth spans the input columns") {
  auto y = random_matrix(50, 10, 2);
  auto v = orth(y);
  REQUIRE(v.cols() == 10);
  CHECK(max_offdiag_identity_error(v) < 1e-12);
  // projection residual: || y - V V^* y ||
  DenseMatrix proj = matmul(v, adjoint_matmul(v, y));
  CHECK((y - proj).frobenius_norm() < 1e-10 * y.frobenius_norm());
}

TEST_CASE("hessenberg-triangular reduction") {
  // already reduced input: stays reduced and reconstructs
  DenseMatrix h0(3, 3), t0(3, 3);
  CounterRng rng(3);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t r = 0; r < 3; ++r) {
      if (r <= c + 1) h0(r, c) = rng.gaussian_complex();
      if (r <= c) t0(r, c) = rng.gaussian_complex();
    }
  DenseMatrix h, t, q, z;
  hessenberg_triangular(h0, t0, h, t, q, z);
  CHECK((matmul(adjoint_matmul(q, h0), z) - h).frobenius_norm() < 1e-12 * h0.frobenius_norm());

  DenseMatrix a1(1, 1), b1(1, 1);
  a1(0, 0) = cd(2, 1);
  b1(0, 0) = cd(1, -1);
  hessenberg_triangular(a1, b1, h, t, q, z);
  CHECK(std::abs(std::abs(q(0, 0)) - 1.0) < 1e-14);

  auto a = random_matrix(8, 8, 4);
  auto b = random_matrix(8, 8, 5);
  hessenberg_triangular(a, b, h, t, q, z);
  CHECK(max_offdiag_identity_error(q) < 1e-12);
  CHECK(max_offdiag_identity_error(z) < 1e-12);
  CHECK((matmul(adjoint_matmul(q, a), z) - h).frobenius_norm() < 1e-10 * a.frobenius_norm());
  CHECK((matmul(adjoint_matmul(q, b), z) - t).frobenius_norm() < 1e-10 * b.frobenius_norm());
  CHECK(strict_lower_max(t) < 1e-12 * b.frobenius_norm());
  for (std::size_t j = 0; j + 2 < 8; ++j)
    for (std::size_t i = j + 2; i < 8; ++i) CHECK(std::abs(h(i, j)) < 1e-12 * a.frobenius_norm());
}

TEST_CASE("qz on simple pencils") {
  DenseMatrix a = DenseMatrix::identity(2), b = DenseMatrix::identity(2);
  a(1, 1) = cd(2, 0);
  auto s = qz(a, b);
  check_schur(a, b, s);
  std::vector<cd> eigs{s.alphas[0] / s.betas[0], s.alphas[1] / s.betas[1]};
  CHECK(oracle::match_eigs(eigs, {cd(1, 0), cd(2, 0)}, 1e-12) < 1e-12);

  // defective nilpotent block
  DenseMatrix n2(2, 2);
  n2(0, 1) = cd(1, 0);
  auto sd = qz(n2, DenseMatrix::identity(2));
  check_schur(n2, DenseMatrix::identity(2), sd);
  CHECK(std::abs(sd.alphas[0] / sd.betas[0]) < 1e-12);
  CHECK(std::abs(sd.alphas[1] / sd.betas[1]) < 1e-12);

  // singular B: one infinite eigenvalue flagged by beta == 0
  DenseMatrix bs = DenseMatrix::identity(2);
  bs(1, 1) = cd(0, 0);
  auto si = qz(a, bs);
  check_schur(a, bs, si);
  std::size_t infinite = 0;
  for (cd be : si.betas)
    if (be == cd(0, 0)) ++infinite;
  CHECK(infinite == 1);
}

TEST_CASE("qz eigenvalues match the characteristic-polynomial reference") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto a = random_matrix(6, 6, 100 + seed);
    auto b = DenseMatrix::identity(6);
    auto s = qz(a, b);
    check_schur(a, b, s);
    std::vector<cd> eigs;
    for (std::size_t i = 0; i < 6; ++i) eigs.push_back(s.alphas[i] / s.betas[i]);
    auto want = oracle::charpoly_eigs(a, b);
    CHECK(oracle::match_eigs(eigs, want, 1e-7) < 1e-7);
  }
}

TEST_CASE("qz reconstruction bounds on random pencils") {
  CounterRng dims(7);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 1 + dims.uniform_int(30);
    auto a = random_matrix(n, n, 1000 + t);
    auto b = random_matrix(n, n, 2000 + t);
    auto s = qz(a, b);
    check_schur(a, b, s);
  }
}

TEST_CASE("eigenvalues invariant under unitary equivalence") {
  auto a = random_matrix(10, 10, 41);
  auto b = random_matrix(10, 10, 42);
  auto u = orth(random_matrix(10, 10, 43));
  auto a2 = matmul(adjoint_matmul(u, a), u);
  auto b2 = matmul(adjoint_matmul(u, b), u);
  auto s1 = qz(a, b);
  auto s2 = qz(a2, b2);
  std::vector<cd> e1, e2;
  for (std::size_t i = 0; i < 10; ++i) {
    e1.push_back(s1.alphas[i] / s1.betas[i]);
    e2.push_back(s2.alphas[i] / s2.betas[i]);
  }
  CHECK(oracle::match_eigs(e1, e2, 1e-10 * a.frobenius_norm()) < 1e-10 * a.frobenius_norm());
}

TEST_CASE("triangular eigenvectors") {
  // diagonal pencil: canonical basis vectors
  DenseMatrix d = DenseMatrix::identity(3);
  d(1, 1) = cd(2, 0);
  d(2, 2) = cd(0, 3);
  auto s = qz(d, DenseMatrix::identity(3));
  DenseMatrix vl, vr;
  triangular_eigvecs(s, vl, vr);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(std::abs(vr(i, i)) - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(vl(i, i)) - 1.0) < 1e-12);
  }

  // 2x2 upper triangular: hand back-substitution
  GeneralizedSchur man;
  man.H_A = DenseMatrix(2, 2);
  man.H_B = DenseMatrix::identity(2);
  man.H_A(0, 0) = cd(1, 0);
  man.H_A(0, 1) = cd(5, 0);
  man.H_A(1, 1) = cd(3, 0);
  man.P_L = DenseMatrix::identity(2);
  man.P_R = DenseMatrix::identity(2);
  man.alphas = {cd(1, 0), cd(3, 0)};
  man.betas = {cd(1, 0), cd(1, 0)};
  triangular_eigvecs(man, vl, vr);
  // second right vector solves (A - 3 I) v = 0 -> v = (5/2, 1)/norm
  CHECK(std::abs(vr(0, 1) / vr(1, 1) - cd(2.5, 0)) < 1e-12);
  // first left vector solves w^*(A - 1 I) = 0 -> w = (1, -5/2)/norm
  CHECK(std::abs(vl(1, 0) / vl(0, 0) - cd(-2.5, 0)) < 1e-12);

  // residuals on a random triangular pencil
  auto s6 = qz(random_matrix(6, 6, 51), random_matrix(6, 6, 52));
  triangular_eigvecs(s6, vl, vr);
  double na = s6.H_A.frobenius_norm();
  for (std::size_t i = 0; i < 6; ++i) {
    std::vector<cd> r(6, cd(0, 0)), l(6, cd(0, 0));
    for (std::size_t row = 0; row < 6; ++row)
      for (std::size_t c = 0; c < 6; ++c) {
        r[row] += (s6.betas[i] * s6.H_A(row, c) - s6.alphas[i] * s6.H_B(row, c)) * vr(c, i);
        l[row] += std::conj(vl(c, i)) * (s6.betas[i] * s6.H_A(c, row) - s6.alphas[i] * s6.H_B(c, row));
      }
    double sc = std::abs(s6.betas[i]) + std::abs(s6.alphas[i]);
    CHECK(vec_norm(r) < 1e-10 * na * sc);
    CHECK(vec_norm(l) < 1e-10 * na * sc);
  }
}

TEST_CASE("reduced solve composes the pieces") {
  // diagonal input
  DenseMatrix d = DenseMatrix::identity(2);
  d(0, 0) = cd(5, 0);
  auto r = reduced_solve(d, DenseMatrix::identity(2));
  CHECK(oracle::match_eigs(r.lambdas, {cd(5, 0), cd(1, 0)}, 1e-12) < 1e-12);

  // random 10x10 against the characteristic-polynomial reference
  auto ma = random_matrix(10, 10, 61);
  auto mb = random_matrix(10, 10, 62);
  auto rr = reduced_solve(ma, mb);
  auto want = oracle::charpoly_eigs(ma, mb);
  std::vector<cd> finite;
  for (std::size_t i = 0; i < rr.lambdas.size(); ++i)
    if (rr.betas[i] != cd(0, 0)) finite.push_back(rr.lambdas[i]);
  CHECK(oracle::match_eigs(finite, want, 1e-7) < 1e-7);

  // eigenvector quality in the original coordinates
  for (std::size_t i = 0; i < 10; ++i) {
    if (rr.betas[i] == cd(0, 0)) continue;
    std::vector<cd> res(10, cd(0, 0));
    for (std::size_t row = 0; row < 10; ++row)
      for (std::size_t c = 0; c < 10; ++c)
        res[row] += (rr.betas[i] * ma(row, c) - rr.alphas[i] * mb(row, c)) * rr.V_R(c, i);
    double sc = (std::abs(rr.betas[i]) + std::abs(rr.alphas[i])) * ma.frobenius_norm();
    CHECK(vec_norm(res) < 1e-9 * sc);
  }
}
