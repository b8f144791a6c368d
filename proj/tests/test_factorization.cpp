// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rfeig/factorization.hpp"
#include "rfeig/rng.hpp"

using namespace rfeig;

namespace {

using Triplet = std::tuple<std::size_t, std::size_t, cd>;

MatrixPencil diag_pencil(const std::vector<cd>& d) {
  std::vector<Triplet> trips;
  for (std::size_t i = 0; i < d.size(); ++i) trips.emplace_back(i, i, d[i]);
  return {ComplexSparseMatrix::from_triplets(d.size(), d.size(), trips),
          ComplexSparseMatrix::identity(d.size())};
}

MatrixPencil random_sparse_pencil(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Triplet> trips;
  for (std::size_t i = 0; i < n; ++i) trips.emplace_back(i, i, cd(4, 0) + rng.gaussian_complex());
  for (std::size_t e = 0; e < 5 * n; ++e)
    trips.emplace_back(rng.uniform_int(n), rng.uniform_int(n), rng.gaussian_complex());
  return {ComplexSparseMatrix::from_triplets(n, n, trips), ComplexSparseMatrix::identity(n)};
}

}  // namespace

TEST_CASE("shifted factorization on simple pencils") {
  MatrixPencil p{ComplexSparseMatrix::from_triplets(3, 3, {}), ComplexSparseMatrix::identity(3)};
  auto f = factorize_shifted(p, cd(2, 0));
  auto x = f.solve(std::vector<cd>{cd(1, 0), cd(0, 0), cd(0, 0)});
  CHECK(std::abs(x[0] - cd(0.5, 0)) < 1e-15);
  CHECK(std::abs(x[1]) == 0.0);

  auto dp = diag_pencil({cd(1, 0), cd(2, 0)});
  auto fd = factorize_shifted(dp, cd(3, 0));
  auto xd = fd.solve(std::vector<cd>{cd(1, 0), cd(1, 0)});
  CHECK(std::abs(xd[0] - cd(0.5, 0)) < 1e-15);    // 1/(3-1)
  CHECK(std::abs(xd[1] - cd(1.0, 0)) < 1e-15);    // 1/(3-2)
}

TEST_CASE("shifted factorization residuals on random sparse systems") {
  auto p = random_sparse_pencil(100, 17);
  cd pole(0.5, 2.0);
  auto f = factorize_shifted(p, pole);
  CounterRng rng(18);
  // K = pole*B - A assembled densely for the residual check
  auto k = p.B.to_dense();
  auto ad = p.A.to_dense();
  for (std::size_t c = 0; c < 100; ++c)
    for (std::size_t r = 0; r < 100; ++r) k(r, c) = pole * k(r, c) - ad(r, c);
  for (int t = 0; t < 10; ++t) {
    std::vector<cd> b(100);
    for (cd& v : b) v = rng.gaussian_complex();
    auto x = f.solve(b);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < 100; ++i) {
      cd kx(0, 0);
      for (std::size_t j = 0; j < 100; ++j) kx += k(i, j) * x[j];
      num += std::norm(kx - b[i]);
      den += std::norm(b[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-10);
  }
}

TEST_CASE("singular shift is reported with the pole") {
  auto dp = diag_pencil({cd(1, 0), cd(2, 0)});
  CHECK_THROWS_AS(factorize_shifted(dp, cd(2, 0)), NumericalError);
}

TEST_CASE("block solve equals column-by-column solves") {
  auto p = random_sparse_pencil(40, 19);
  auto f = factorize_shifted(p, cd(1, 3));
  CounterRng rng(20);
  DenseMatrix b(40, 5);
  for (std::size_t c = 0; c < 5; ++c)
    for (std::size_t r = 0; r < 40; ++r) b(r, c) = rng.gaussian_complex();
  DenseMatrix x = f.solve(b);
  for (std::size_t c = 0; c < 5; ++c) {
    auto xc = f.solve(b.col_vec(c));
    for (std::size_t r = 0; r < 40; ++r) CHECK(x(r, c) == xc[r]);
  }
}

TEST_CASE("inner filter operator on diagonal pencils") {
  DiskRegion reg{cd(0, 0), 1.0};
  std::vector<cd> d{cd(0.1, 0.2), cd(-0.5, 0.1), cd(2, 1), cd(0.9, -0.3)};
  auto p = diag_pencil(d);

  // single pole: G e_j = w1 / (p1 - a_jj) e_j
  auto pw1 = trapezoid_rule(reg, 1);
  auto g1 = build_inner_operator(p, pw1);
  for (std::size_t j = 0; j < d.size(); ++j) {
    std::vector<cd> e(d.size(), cd(0, 0)), y(d.size());
    e[j] = cd(1, 0);
    g1->apply(e.data(), y.data());
    cd expect = pw1.weights[0] / (pw1.poles[0] - d[j]);
    CHECK(std::abs(y[j] - expect) < 1e-12);
  }

  // k1 poles: eigenvalues of G equal the scalar filter values
  for (std::size_t k1 : {2, 4, 8, 16}) {
    auto pw = trapezoid_rule(reg, k1);
    auto g = build_inner_operator(p, pw);
    for (std::size_t j = 0; j < d.size(); ++j) {
      std::vector<cd> e(d.size(), cd(0, 0)), y(d.size());
      e[j] = cd(1, 0);
      g->apply(e.data(), y.data());
      cd expect = eval_compact(reg, k1, d[j]);
      CHECK(std::abs(y[j] - expect) < 1e-10 * std::abs(expect));
    }
  }
}

TEST_CASE("spectral mapping on a dense random pencil") {
  DiskRegion reg{cd(0, 0), 1.0};
  CounterRng rng(31);
  std::vector<cd> inside{cd(0.3, 0.1), cd(-0.4, -0.2)};
  std::vector<cd> outside{cd(1.8, 0.5), cd(-2.2, 0.4), cd(0.1, 2.0)};
  auto sp = gen_spectrum_pencil(inside, outside, 77);
  auto pw = trapezoid_rule(reg, 8);
  auto g = build_inner_operator(sp.pencil, pw);
  // densify G column by column and take its spectrum via the reference solver
  std::size_t n = sp.pencil.dim();
  DenseMatrix gd(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<cd> e(n, cd(0, 0)), y(n);
    e[j] = cd(1, 0);
    g->apply(e.data(), y.data());
    gd.set_col(j, y);
  }
  auto res = oracle::dense_ggev(gd, DenseMatrix::identity(n));
  std::vector<cd> want;
  for (cd l : sp.eigenvalues) want.push_back(eval_compact(reg, 8, l));
  CHECK(oracle::match_eigs(res.finite_eigenvalues(), want, 1e-8) < 1e-8);
}

TEST_CASE("toy spectrum Rayleigh value under the order-16 filter") {
  DiskRegion reg{cd(0, 0), 1.0};
  std::vector<cd> inside{cd(0, 0), cd(0.75, 0)};
  std::vector<cd> outside{std::pow(2.0, 0.25) * std::polar(1.0, M_PI / 4)};
  auto sp = gen_spectrum_pencil(inside, outside, 13);
  // exact eigenvector of lambda_2 = 0.75 via the reference dense solver
  auto res = oracle::dense_ggev(sp.pencil.A.to_dense(), sp.pencil.B.to_dense(), true);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < 3; ++i)
    if (std::abs(res.alphas[i] / res.betas[i] - cd(0.75, 0)) < 1e-8) idx = i;
  std::vector<cd> x2 = res.vr.col_vec(idx);
  auto pw = trapezoid_rule(reg, 16);
  auto g = build_inner_operator(sp.pencil, pw);
  std::vector<cd> gx(3);
  g->apply(x2.data(), gx.data());
  cd num(0, 0), den(0, 0);
  for (std::size_t i = 0; i < 3; ++i) {
    num += std::conj(x2[i]) * gx[i];
    den += std::conj(x2[i]) * x2[i];
  }
  CHECK(std::abs(num / den) == doctest::Approx(0.9901).epsilon(5e-4));
}

TEST_CASE("filter linearity") {
  auto p = random_sparse_pencil(60, 23);
  DiskRegion reg{cd(0, 0), 2.0};
  auto pw = trapezoid_rule(reg, 4);
  auto g = build_inner_operator(p, pw);
  CounterRng rng(24);
  DenseMatrix y1(60, 3), y2(60, 3);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t r = 0; r < 60; ++r) {
      y1(r, c) = rng.gaussian_complex();
      y2(r, c) = rng.gaussian_complex();
    }
  cd al(0.3, -1.2), be(2.0, 0.7);
  DenseMatrix lhs = g->apply_block(scale(y1, al) + scale(y2, be));
  DenseMatrix rhs = scale(g->apply_block(y1), al) + scale(g->apply_block(y2), be);
  double scale_ref = std::max(lhs.frobenius_norm(), 1e-300);
  CHECK((lhs - rhs).frobenius_norm() < 1e-12 * scale_ref);
}

TEST_CASE("operator application counters") {
  auto p = random_sparse_pencil(30, 25);
  auto pw = trapezoid_rule(DiskRegion{cd(0, 0), 2.0}, 3);
  auto g = build_inner_operator(p, pw);
  CHECK(g->apply_count() == 0);
  DenseMatrix y(30, 4);
  y(0, 0) = cd(1, 0);
  y(1, 1) = cd(1, 0);
  y(2, 2) = cd(1, 0);
  y(3, 3) = cd(1, 0);
  g->apply_block(y);
  CHECK(g->apply_count() == 1);
  CHECK(g->column_count() == 4);
  std::vector<cd> e(30, cd(0, 0)), out(30);
  e[0] = cd(1, 0);
  g->apply(e.data(), out.data());
  CHECK(g->apply_count() == 2);
  CHECK(g->column_count() == 5);
  g->reset_counters();
  CHECK(g->apply_count() == 0);
  CHECK(g->column_count() == 0);
}

TEST_CASE("one-shot filter equals the operator and respects k=1 degenerate case") {
  auto p = random_sparse_pencil(50, 26);
  DiskRegion reg{cd(0, 0), 2.0};
  CounterRng rng(27);
  DenseMatrix y(50, 2);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t r = 0; r < 50; ++r) y(r, c) = rng.gaussian_complex();

  auto pw = trapezoid_rule(reg, 6);
  auto g = build_inner_operator(p, pw);
  DenseMatrix u1 = apply_simple_filter(p, pw, y);
  DenseMatrix u2 = g->apply_block(y);
  CHECK((u1 - u2).frobenius_norm() == 0.0);

  auto pw1 = trapezoid_rule(reg, 1);
  auto f = factorize_shifted(p, pw1.poles[0]);
  DenseMatrix by = spmv_block(p.B, y);
  DenseMatrix direct = scale(f.solve(by), pw1.weights[0]);
  CHECK((apply_simple_filter(p, pw1, y) - direct).frobenius_norm() < 1e-14);
}

TEST_CASE("multi-threaded application matches single-threaded") {
  auto p = random_sparse_pencil(80, 29);
  auto pw = trapezoid_rule(DiskRegion{cd(0, 0), 2.0}, 4);
  auto g1 = build_inner_operator(p, pw, 1);
  auto g4 = build_inner_operator(p, pw, 4);
  CounterRng rng(30);
  DenseMatrix y(80, 7);
  for (std::size_t c = 0; c < 7; ++c)
    for (std::size_t r = 0; r < 80; ++r) y(r, c) = rng.gaussian_complex();
  DenseMatrix u1 = g1->apply_block(y);
  DenseMatrix u4 = g4->apply_block(y);
  CHECK((u1 - u4).frobenius_norm() < 1e-12 * u1.frobenius_norm());
}
