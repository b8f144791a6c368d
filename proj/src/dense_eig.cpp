// SPDX-License-Identifier: Apache-2.0
#include "rfeig/dense_eig.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

namespace rfeig {

namespace {

// [c s; -conj(s) c] [f; g] = [r; 0], c real nonnegative.
void givens(cd f, cd g, double& c, cd& s, cd& r) {
  double af = std::abs(f), ag = std::abs(g);
  if (ag == 0.0) {
    c = 1.0;
    s = cd(0.0, 0.0);
    r = f;
    return;
  }
  if (af == 0.0) {
    c = 0.0;
    s = std::conj(g) / ag;
    r = cd(ag, 0.0);
    return;
  }
  double d = std::hypot(af, ag);
  c = af / d;
  cd fs = f / af;
  s = fs * std::conj(g) / d;
  r = fs * d;
}

// Rows i1, i2 over columns [jc0, jc1): row_i1 = c*row_i1 + s*row_i2.
void rot_rows(DenseMatrix& m, std::size_t i1, std::size_t i2, double c, cd s, std::size_t jc0,
              std::size_t jc1) {
  for (std::size_t j = jc0; j < jc1; ++j) {
    cd t = c * m(i1, j) + s * m(i2, j);
    m(i2, j) = -std::conj(s) * m(i1, j) + c * m(i2, j);
    m(i1, j) = t;
  }
}

// Columns j1, j2 over rows [ir0, ir1): col_j1 = c*col_j1 + s*col_j2.
void rot_cols(DenseMatrix& m, std::size_t j1, std::size_t j2, double c, cd s, std::size_t ir0,
              std::size_t ir1) {
  for (std::size_t i = ir0; i < ir1; ++i) {
    cd t = c * m(i, j1) + s * m(i, j2);
    m(i, j2) = -std::conj(s) * m(i, j1) + c * m(i, j2);
    m(i, j1) = t;
  }
}

// Householder vector for x (length m): returns (v, tau) with
// (I - tau v v^*) x = (-phase(x0) * ||x||) e_1, v[0] = 1.
void householder(const cd* x, std::size_t m, std::vector<cd>& v, cd& tau, cd& new_head) {
  v.assign(x, x + m);
  double xnorm = 0.0;
  for (std::size_t i = 1; i < m; ++i) xnorm += std::norm(x[i]);
  double a0 = std::abs(x[0]);
  if (xnorm == 0.0 && x[0].imag() == 0.0) {
    tau = cd(0.0, 0.0);
    new_head = x[0];
    return;
  }
  double beta = std::sqrt(a0 * a0 + xnorm);
  cd phase = (a0 == 0.0) ? cd(1.0, 0.0) : x[0] / a0;
  cd alpha = -phase * beta;
  cd denom = x[0] - alpha;
  for (std::size_t i = 1; i < m; ++i) v[i] /= denom;
  v[0] = cd(1.0, 0.0);
  tau = (alpha - x[0]) / alpha;  // real, in [1, 2]
  new_head = alpha;
}

// Applies (I - tau v v^*) from the left to columns [j0, cols) of m, rows [i0, i0+len).
void apply_householder_left(DenseMatrix& m, const std::vector<cd>& v, cd tau, std::size_t i0,
                            std::size_t len, std::size_t j0) {
  if (tau == cd(0.0, 0.0)) return;
  for (std::size_t j = j0; j < m.cols(); ++j) {
    cd dot(0.0, 0.0);
    for (std::size_t i = 0; i < len; ++i) dot += std::conj(v[i]) * m(i0 + i, j);
    dot *= tau;
    for (std::size_t i = 0; i < len; ++i) m(i0 + i, j) -= dot * v[i];
  }
}

}  // namespace

DenseMatrix orth(const DenseMatrix& y, double rank_tol) {
  const std::size_t m = y.rows(), n = y.cols();
  if (m == 0 || n == 0) throw DimensionError("orth: empty input");
  DenseMatrix r = y;
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < n; ++j) perm[j] = j;
  std::vector<double> colnorm(n);
  std::vector<std::vector<cd>> hh_v;
  std::vector<cd> hh_tau;
  std::size_t kmax = std::min(m, n);
  double r00 = 0.0;
  std::size_t rank = 0;
  std::vector<cd> v;
  for (std::size_t k = 0; k < kmax; ++k) {
    // column pivoting on remaining norms
    std::size_t best = k;
    double bestn = -1.0;
    for (std::size_t j = k; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += std::norm(r(i, j));
      colnorm[j] = s;
      if (s > bestn) {
        bestn = s;
        best = j;
      }
    }
    if (best != k) {
      for (std::size_t i = 0; i < m; ++i) std::swap(r(i, k), r(i, best));
      std::swap(perm[k], perm[best]);
    }
    cd tau, head;
    householder(r.col(k) + k, m - k, v, tau, head);
    if (k == 0) r00 = std::abs(head);
    if (r00 == 0.0 || std::abs(head) <= rank_tol * r00) break;
    ++rank;
    hh_v.push_back(v);
    hh_tau.push_back(tau);
    r(k, k) = head;
    for (std::size_t i = k + 1; i < m; ++i) r(i, k) = cd(0.0, 0.0);
    apply_householder_left(r, v, tau, k, m - k, k + 1);
  }
  if (rank == 0) throw NumericalError("orth: numerically zero input");
  // Form the first `rank` columns of Q by applying the reflectors to I.
  DenseMatrix q(m, rank);
  for (std::size_t j = 0; j < rank; ++j) q(j, j) = cd(1.0, 0.0);
  for (std::size_t k = rank; k-- > 0;) {
    const auto& vk = hh_v[k];
    cd tk = std::conj(hh_tau[k]);  // apply (I - conj(tau) v v^*) = (I - tau v v^*)^*
    for (std::size_t j = 0; j < rank; ++j) {
      cd dot(0.0, 0.0);
      for (std::size_t i = 0; i < m - k; ++i) dot += std::conj(vk[i]) * q(k + i, j);
      dot *= tk;
      for (std::size_t i = 0; i < m - k; ++i) q(k + i, j) -= dot * vk[i];
    }
  }
  return q;
}

void hessenberg_triangular(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& h,
                           DenseMatrix& t, DenseMatrix& q, DenseMatrix& z) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n)
    throw DimensionError("hessenberg_triangular: need square pencil");
  h = a;
  t = b;
  q = DenseMatrix::identity(n);
  z = DenseMatrix::identity(n);
  // QR-factor T by Householder reflectors, applied to H and accumulated in Q.
  std::vector<cd> v;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    cd tau, head;
    householder(t.col(k) + k, n - k, v, tau, head);
    t(k, k) = head;
    for (std::size_t i = k + 1; i < n; ++i) t(i, k) = cd(0.0, 0.0);
    apply_householder_left(t, v, tau, k, n - k, k + 1);
    apply_householder_left(h, v, tau, k, n - k, 0);
    // Q := Q (I - tau v v^*)^* ; accumulate on columns.
    if (tau != cd(0.0, 0.0)) {
      for (std::size_t i = 0; i < n; ++i) {
        cd dot(0.0, 0.0);
        for (std::size_t l = 0; l < n - k; ++l) dot += q(i, k + l) * v[l];
        dot *= std::conj(tau);
        for (std::size_t l = 0; l < n - k; ++l) q(i, k + l) -= dot * std::conj(v[l]);
      }
    }
  }
  // Reduce H to Hessenberg with Givens rotations, keeping T triangular.
  double c;
  cd s, r;
  for (std::size_t j = 0; j + 2 < n; ++j) {
    for (std::size_t i = n - 1; i >= j + 2; --i) {
      // zero H(i, j) against H(i-1, j) from the left
      givens(h(i - 1, j), h(i, j), c, s, r);
      h(i - 1, j) = r;
      h(i, j) = cd(0.0, 0.0);
      rot_rows(h, i - 1, i, c, s, j + 1, n);
      rot_rows(t, i - 1, i, c, s, i - 1, n);
      rot_cols(q, i - 1, i, c, std::conj(s), 0, n);
      // the row rotation fills T(i, i-1); zero it from the right
      givens(t(i, i), t(i, i - 1), c, s, r);
      t(i, i) = r;
      t(i, i - 1) = cd(0.0, 0.0);
      rot_cols(h, i, i - 1, c, s, 0, n);
      rot_cols(t, i, i - 1, c, s, 0, i);
      rot_cols(z, i, i - 1, c, s, 0, n);
    }
  }
}

GeneralizedSchur qz(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.rows();
  GeneralizedSchur out;
  if (n == 0) return out;
  DenseMatrix h, t, q, z;
  hessenberg_triangular(a, b, h, t, q, z);
  out.alphas.assign(n, cd(0.0, 0.0));
  out.betas.assign(n, cd(0.0, 0.0));

  const double safmin = DBL_MIN;
  const double ulp = 1e-14;
  const double atol = std::max(safmin, ulp * h.frobenius_norm());
  const double btol = std::max(safmin, ulp * t.frobenius_norm());
  double c;
  cd s, r;

  long ilast = static_cast<long>(n) - 1;
  long iiter = 0;
  cd eshift(0.0, 0.0);
  const long maxit = 30 * static_cast<long>(n);

  auto standardize = [&](long il) {
    double absb = std::abs(t(il, il));
    if (absb > safmin) {
      cd signbc = std::conj(t(il, il) / absb);
      t(il, il) = cd(absb, 0.0);
      for (long i = 0; i < il; ++i) t(i, il) *= signbc;
      for (long i = 0; i <= il; ++i) h(i, il) *= signbc;
      for (std::size_t i = 0; i < n; ++i) z(i, il) *= signbc;
    } else {
      t(il, il) = cd(0.0, 0.0);
    }
    out.alphas[il] = h(il, il);
    out.betas[il] = t(il, il);
  };

  long jiter = 0;
  while (ilast >= 0) {
    if (++jiter > maxit) throw NumericalError("qz: iteration limit exceeded");

    long ifirst = -1;
    bool do_sweep = false;
    bool do_deflate_inf = false;  // T(ilast, ilast) == 0 case

    if (ilast == 0) {
      standardize(0);
      --ilast;
      iiter = 0;
      eshift = cd(0.0, 0.0);
      continue;
    }
    if (std::abs(h(ilast, ilast - 1)) <=
        std::max(safmin, ulp * (std::abs(h(ilast, ilast)) + std::abs(h(ilast - 1, ilast - 1))))) {
      h(ilast, ilast - 1) = cd(0.0, 0.0);
      standardize(ilast);
      --ilast;
      iiter = 0;
      eshift = cd(0.0, 0.0);
      continue;
    }
    if (std::abs(t(ilast, ilast)) <=
        std::max(safmin,
                 ulp * (std::abs(t(ilast - 1, ilast)) + std::abs(t(ilast - 1, ilast - 1))))) {
      t(ilast, ilast) = cd(0.0, 0.0);
      do_deflate_inf = true;
    }

    if (!do_deflate_inf) {
      for (long j = ilast - 1; j >= 0; --j) {
        bool ilazro;
        if (j == 0) {
          ilazro = true;
        } else if (std::abs(h(j, j - 1)) <=
                   std::max(safmin,
                            ulp * (std::abs(h(j, j)) + std::abs(h(j - 1, j - 1))))) {
          h(j, j - 1) = cd(0.0, 0.0);
          ilazro = true;
        } else {
          ilazro = false;
        }
        double tnb = std::abs(t(j, j + 1)) + (j > 0 ? std::abs(t(j - 1, j)) : 0.0);
        if (std::abs(t(j, j)) < std::max(safmin, ulp * tnb)) {
          t(j, j) = cd(0.0, 0.0);
          bool ilazr2 = false;
          if (!ilazro &&
              std::abs(h(j, j - 1)) * std::abs(h(j + 1, j)) <= std::abs(h(j, j)) * atol)
            ilazr2 = true;
          if (ilazro || ilazr2) {
            // A zero T diagonal at the top of the block: split 1x1 blocks
            // off the top while chasing.
            bool handled = false;
            for (long jch = j; jch < ilast; ++jch) {
              givens(h(jch, jch), h(jch + 1, jch), c, s, r);
              h(jch, jch) = r;
              h(jch + 1, jch) = cd(0.0, 0.0);
              rot_rows(h, jch, jch + 1, c, s, jch + 1, n);
              rot_rows(t, jch, jch + 1, c, s, jch + 1, n);
              rot_cols(q, jch, jch + 1, c, std::conj(s), 0, n);
              if (ilazr2) h(jch, jch - 1) *= c;
              ilazr2 = false;
              if (std::abs(t(jch + 1, jch + 1)) >= btol) {
                if (jch + 1 >= ilast) {
                  standardize(ilast);
                  --ilast;
                  iiter = 0;
                  eshift = cd(0.0, 0.0);
                } else {
                  ifirst = jch + 1;
                  do_sweep = true;
                }
                handled = true;
                break;
              }
              t(jch + 1, jch + 1) = cd(0.0, 0.0);
            }
            if (!handled) do_deflate_inf = true;
          } else {
            // Chase the zero T diagonal down to (ilast, ilast).
            for (long jch = j; jch < ilast; ++jch) {
              givens(t(jch, jch + 1), t(jch + 1, jch + 1), c, s, r);
              t(jch, jch + 1) = r;
              t(jch + 1, jch + 1) = cd(0.0, 0.0);
              if (jch < static_cast<long>(n) - 2) rot_rows(t, jch, jch + 1, c, s, jch + 2, n);
              rot_rows(h, jch, jch + 1, c, s, jch - 1, n);
              rot_cols(q, jch, jch + 1, c, std::conj(s), 0, n);
              givens(h(jch + 1, jch), h(jch + 1, jch - 1), c, s, r);
              h(jch + 1, jch) = r;
              h(jch + 1, jch - 1) = cd(0.0, 0.0);
              rot_cols(h, jch, jch - 1, c, s, 0, jch + 1);
              rot_cols(t, jch, jch - 1, c, s, 0, jch);
              rot_cols(z, jch, jch - 1, c, s, 0, n);
            }
            do_deflate_inf = true;
          }
          break;
        } else if (ilazro) {
          ifirst = j;
          do_sweep = true;
          break;
        }
      }
      if (!do_sweep && !do_deflate_inf && ifirst < 0 && ilast >= 0) {
        // loop fell through without a split point; should not happen
        throw NumericalError("qz: internal splitting failure");
      }
    }

    if (do_deflate_inf) {
      // T(ilast, ilast) = 0: clear H(ilast, ilast-1) with a column rotation,
      // deflating an infinite eigenvalue.
      givens(h(ilast, ilast), h(ilast, ilast - 1), c, s, r);
      h(ilast, ilast) = r;
      h(ilast, ilast - 1) = cd(0.0, 0.0);
      rot_cols(h, ilast, ilast - 1, c, s, 0, ilast);
      rot_cols(t, ilast, ilast - 1, c, s, 0, ilast);
      rot_cols(z, ilast, ilast - 1, c, s, 0, n);
      standardize(ilast);
      --ilast;
      iiter = 0;
      eshift = cd(0.0, 0.0);
      continue;
    }
    if (!do_sweep) continue;

    // --- single-shift QZ sweep on [ifirst, ilast] ---
    ++iiter;
    cd shift;
    if (iiter % 10 != 0) {
      // generalized Wilkinson shift from the trailing 2x2 of H T^{-1}
      cd u12 = t(ilast - 1, ilast) / t(ilast, ilast);
      cd ad11 = h(ilast - 1, ilast - 1) / t(ilast - 1, ilast - 1);
      cd ad21 = h(ilast, ilast - 1) / t(ilast - 1, ilast - 1);
      cd ad12 = h(ilast - 1, ilast) / t(ilast, ilast);
      cd ad22 = h(ilast, ilast) / t(ilast, ilast);
      cd abi22 = ad22 - u12 * ad21;
      cd abi12 = ad12 - u12 * ad11;
      shift = abi22;
      cd ctemp = std::sqrt(abi12) * std::sqrt(ad21);
      if (ctemp != cd(0.0, 0.0)) {
        cd x = 0.5 * (ad11 - shift);
        double temp2 = std::abs(x);
        double temp = std::max(std::abs(ctemp), temp2);
        cd y = temp * std::sqrt((x / temp) * (x / temp) + (ctemp / temp) * (ctemp / temp));
        if (temp2 > 0.0) {
          cd xt = x / temp2;
          if (xt.real() * y.real() + xt.imag() * y.imag() < 0.0) y = -y;
        }
        shift -= ctemp * (ctemp / (x + y));
      }
    } else {
      if (iiter % 20 == 0 && std::abs(t(ilast, ilast)) > safmin)
        eshift += h(ilast, ilast) / t(ilast, ilast);
      else
        eshift += h(ilast, ilast - 1) / t(ilast - 1, ilast - 1);
      shift = eshift;
    }

    // check for two consecutive small subdiagonals (early sweep start)
    long istart = ifirst;
    cd ctemp = h(ifirst, ifirst) - shift * t(ifirst, ifirst);
    for (long j = ilast - 1; j >= ifirst + 1; --j) {
      cd c1 = h(j, j) - shift * t(j, j);
      double temp = std::abs(c1);
      double temp2 = std::abs(h(j + 1, j));
      double tempr = std::max(temp, temp2);
      if (tempr < 1.0 && tempr != 0.0) {
        temp /= tempr;
        temp2 /= tempr;
      }
      if (std::abs(h(j, j - 1)) * temp2 <= temp * atol) {
        istart = j;
        ctemp = c1;
        break;
      }
    }

    givens(ctemp, h(istart + 1, istart), c, s, r);
    for (long j = istart; j < ilast; ++j) {
      if (j > istart) {
        givens(h(j, j - 1), h(j + 1, j - 1), c, s, r);
        h(j, j - 1) = r;
        h(j + 1, j - 1) = cd(0.0, 0.0);
      }
      rot_rows(h, j, j + 1, c, s, j, n);
      rot_rows(t, j, j + 1, c, s, j, n);
      rot_cols(q, j, j + 1, c, std::conj(s), 0, n);

      givens(t(j + 1, j + 1), t(j + 1, j), c, s, r);
      t(j + 1, j + 1) = r;
      t(j + 1, j) = cd(0.0, 0.0);
      rot_cols(h, j + 1, j, c, s, 0, std::min<long>(j + 3, ilast + 1));
      rot_cols(t, j + 1, j, c, s, 0, j + 1);
      rot_cols(z, j + 1, j, c, s, 0, n);
    }
  }

  out.H_A = std::move(h);
  out.H_B = std::move(t);
  out.P_L = std::move(q);
  out.P_R = std::move(z);
  // clean strict lower triangles
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) {
      out.H_A(i, j) = cd(0.0, 0.0);
      out.H_B(i, j) = cd(0.0, 0.0);
    }
  return out;
}

void triangular_eigvecs(const GeneralizedSchur& sc, DenseMatrix& v_l, DenseMatrix& v_r) {
  const std::size_t n = sc.H_A.rows();
  v_l = DenseMatrix(n, n);
  v_r = DenseMatrix(n, n);
  const double scale = std::max(sc.H_A.frobenius_norm(), sc.H_B.frobenius_norm());
  const double small = 1e-290 + 1e-16 * scale;
  for (std::size_t i = 0; i < n; ++i) {
    cd alpha = sc.alphas[i], beta = sc.betas[i];
    // M = beta H_A - alpha H_B is singular in position i.
    auto m_at = [&](std::size_t p, std::size_t q2) {
      return beta * sc.H_A(p, q2) - alpha * sc.H_B(p, q2);
    };
    // right vector: back substitution above row i
    v_r(i, i) = cd(1.0, 0.0);
    for (std::size_t j = i; j-- > 0;) {
      cd sum(0.0, 0.0);
      for (std::size_t l = j + 1; l <= i; ++l) sum += m_at(j, l) * v_r(l, i);
      cd d = m_at(j, j);
      if (std::abs(d) < small) d = cd(small, 0.0);
      v_r(j, i) = -sum / d;
    }
    // left vector: forward substitution below row i on M^*
    v_l(i, i) = cd(1.0, 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      cd sum(0.0, 0.0);
      for (std::size_t l = i; l < j; ++l) sum += std::conj(m_at(l, j)) * v_l(l, i);
      cd d = std::conj(m_at(j, j));
      if (std::abs(d) < small) d = cd(small, 0.0);
      v_l(j, i) = -sum / d;
    }
    // normalize
    double nr = 0.0, nl = 0.0;
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      nr += std::norm(v_r(j2, i));
      nl += std::norm(v_l(j2, i));
    }
    nr = std::sqrt(nr);
    nl = std::sqrt(nl);
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      v_r(j2, i) /= nr;
      v_l(j2, i) /= nl;
    }
  }
}

ReducedEigResult reduced_solve(const DenseMatrix& m_a, const DenseMatrix& m_b) {
  ReducedEigResult res;
  res.schur = qz(m_a, m_b);
  const std::size_t n = m_a.rows();
  res.alphas = res.schur.alphas;
  res.betas = res.schur.betas;
  res.lambdas.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (res.betas[i] == cd(0.0, 0.0))
      res.lambdas[i] = cd(std::numeric_limits<double>::infinity(), 0.0);
    else
      res.lambdas[i] = res.alphas[i] / res.betas[i];
  }
  DenseMatrix vl_t, vr_t;
  triangular_eigvecs(res.schur, vl_t, vr_t);
  res.V_L = matmul(res.schur.P_L, vl_t);
  res.V_R = matmul(res.schur.P_R, vr_t);
  return res;
}

}  // namespace rfeig
