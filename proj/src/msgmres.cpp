// SPDX-License-Identifier: Apache-2.0
#include "rfeig/msgmres.hpp"

#include <algorithm>
#include <cmath>

namespace rfeig {

namespace {

void givens(cd f, cd g, double& c, cd& s) {
  double af = std::abs(f), ag = std::abs(g);
  if (ag == 0.0) {
    c = 1.0;
    s = cd(0.0, 0.0);
    return;
  }
  if (af == 0.0) {
    c = 0.0;
    s = std::conj(g) / ag;
    return;
  }
  double d = std::hypot(af, ag);
  c = af / d;
  s = (f / af) * std::conj(g) / d;
}

}  // namespace

MultiShiftGmres::MultiShiftGmres(const MatVecOperator& g, std::vector<cd> b, double tol,
                                 std::size_t max_iter)
    : g_(g), b_(std::move(b)), tol_(tol), max_iter_(max_iter) {
  ws_.dim = b_.size();
  if (ws_.dim != g.dim()) throw DimensionError("MultiShiftGmres: operator/vector mismatch");
  ws_.beta = vec_norm(b_);
  if (ws_.beta == 0.0) throw std::invalid_argument("MultiShiftGmres: zero right-hand side");
  std::vector<cd> v0 = b_;
  for (cd& x : v0) x /= ws_.beta;
  ws_.v.push_back(std::move(v0));
}

bool MultiShiftGmres::arnoldi_step() {
  if (ws_.breakdown || ws_.n >= max_iter_) return false;
  const std::size_t j = ws_.n;
  std::vector<cd> w(ws_.dim);
  g_.apply(ws_.v[j].data(), w.data());
  ++ws_.op_applications;
  double pre_norm = vec_norm(w);
  std::vector<cd> hj(j + 2, cd(0.0, 0.0));
  // modified Gram-Schmidt
  for (std::size_t i = 0; i <= j; ++i) {
    cd hij = vec_dot(ws_.v[i], w);
    hj[i] = hij;
    const std::vector<cd>& vi = ws_.v[i];
    for (std::size_t l = 0; l < ws_.dim; ++l) w[l] -= hij * vi[l];
  }
  double post_norm = vec_norm(w);
  if (post_norm < pre_norm * M_SQRT1_2) {
    // severe cancellation: one reorthogonalization pass
    for (std::size_t i = 0; i <= j; ++i) {
      cd corr = vec_dot(ws_.v[i], w);
      hj[i] += corr;
      const std::vector<cd>& vi = ws_.v[i];
      for (std::size_t l = 0; l < ws_.dim; ++l) w[l] -= corr * vi[l];
    }
    post_norm = vec_norm(w);
  }
  double colsq = 0.0;
  for (std::size_t i = 0; i <= j; ++i) colsq += std::norm(hj[i]);
  ws_.h_norm = std::hypot(ws_.h_norm, std::sqrt(colsq + post_norm * post_norm));
  if (post_norm < 1e-14 * ws_.h_norm) {
    ws_.breakdown = true;
    hj[j + 1] = cd(0.0, 0.0);
  } else {
    hj[j + 1] = cd(post_norm, 0.0);
    for (cd& x : w) x /= post_norm;
    ws_.v.push_back(std::move(w));
  }
  ws_.h_cols.push_back(std::move(hj));
  ++ws_.n;
  for (ShiftState& st : states_)
    if (!st.converged) process_column(st, j);
  return true;
}

void MultiShiftGmres::process_column(ShiftState& st, std::size_t j) const {
  // shifted Hessenberg column: H(:, j) - shift at row j
  std::vector<cd> col(ws_.h_cols[j]);
  col[j] -= st.shift;
  // apply previous rotations
  for (std::size_t i = 0; i < j; ++i) {
    cd t = st.giv_c[i] * col[i] + st.giv_s[i] * col[i + 1];
    col[i + 1] = -std::conj(st.giv_s[i]) * col[i] + st.giv_c[i] * col[i + 1];
    col[i] = t;
  }
  double c;
  cd s;
  givens(col[j], col[j + 1], c, s);
  cd rjj = c * col[j] + s * col[j + 1];
  col[j] = rjj;
  col.resize(j + 1);
  st.giv_c.push_back(c);
  st.giv_s.push_back(s);
  st.r_cols.push_back(std::move(col));
  if (st.g.empty()) st.g.assign(1, cd(ws_.beta, 0.0));
  st.g.push_back(cd(0.0, 0.0));
  cd t = c * st.g[j] + s * st.g[j + 1];
  st.g[j + 1] = -std::conj(s) * st.g[j] + c * st.g[j + 1];
  st.g[j] = t;
  st.residual = std::abs(st.g[j + 1]) / ws_.beta;
  st.iterations = j + 1;
  if (st.residual <= tol_) {
    st.converged = true;
    st.frozen_x = dense_solution(st, j + 1);
  }
}

std::vector<cd> MultiShiftGmres::dense_solution(const ShiftState& st, std::size_t nn) const {
  // back substitution R y = g(0..nn-1)
  std::vector<cd> y(nn);
  for (std::size_t i = nn; i-- > 0;) {
    cd sum = st.g[i];
    for (std::size_t l = i + 1; l < nn; ++l) sum -= st.r_cols[l][i] * y[l];
    cd d = st.r_cols[i][i];
    if (std::abs(d) < 1e-300) throw NumericalError("msgmres: singular least-squares factor");
    y[i] = sum / d;
  }
  std::vector<cd> x(ws_.dim, cd(0.0, 0.0));
  for (std::size_t l = 0; l < nn; ++l) {
    const std::vector<cd>& vl = ws_.v[l];
    for (std::size_t i = 0; i < ws_.dim; ++i) x[i] += y[l] * vl[i];
  }
  return x;
}

std::vector<std::size_t> MultiShiftGmres::add_shifts(const std::vector<cd>& shifts) {
  std::vector<std::size_t> idx;
  for (cd s : shifts) {
    ShiftState st;
    st.shift = s;
    states_.push_back(std::move(st));
    ShiftState& ref = states_.back();
    for (std::size_t j = 0; j < ws_.n && !ref.converged; ++j) process_column(ref, j);
    idx.push_back(states_.size() - 1);
  }
  return idx;
}

void MultiShiftGmres::run() {
  auto all_done = [&]() {
    for (const ShiftState& st : states_)
      if (!st.converged) return false;
    return true;
  };
  while (!all_done()) {
    if (!arnoldi_step()) break;
  }
  if (ws_.breakdown) {
    // exact Krylov span: residuals are final; mark converged shifts
    for (ShiftState& st : states_) {
      if (!st.converged && st.residual <= tol_) {
        st.converged = true;
        st.frozen_x = dense_solution(st, st.iterations);
      }
    }
  }
}

ShiftSolution MultiShiftGmres::shift_result(std::size_t idx) const {
  const ShiftState& st = states_.at(idx);
  ShiftSolution out;
  out.shift = st.shift;
  out.residual = st.residual;
  out.iterations = st.iterations;
  out.converged = st.converged;
  if (st.converged)
    out.x = st.frozen_x;
  else if (st.iterations > 0)
    out.x = dense_solution(st, st.iterations);
  else
    out.x.assign(ws_.dim, cd(0.0, 0.0));
  return out;
}

ShiftedSolveResult solve_all_shifts(const MatVecOperator& g, const std::vector<cd>& b,
                                    const std::vector<cd>& shifts, double tol,
                                    std::size_t max_iter) {
  MultiShiftGmres ms(g, b, tol, max_iter);
  ms.add_shifts(shifts);
  ms.run();
  ShiftedSolveResult res;
  for (std::size_t i = 0; i < ms.n_shifts(); ++i) res.solutions.push_back(ms.shift_result(i));
  res.op_applications = ms.op_applications();
  return res;
}

std::vector<cd> combine_solutions(const std::vector<std::vector<cd>>& solutions,
                                  const CompositeCoeffs& coeffs, const std::vector<cd>& gb) {
  if (solutions.size() != coeffs.shifts.size())
    throw std::invalid_argument("combine_solutions: solution/shift count mismatch");
  std::vector<cd> u(gb.size(), cd(0.0, 0.0));
  for (std::size_t j = 0; j < solutions.size(); ++j) {
    if (solutions[j].size() != gb.size())
      throw DimensionError("combine_solutions: dimension mismatch");
    const cd c = coeffs.weights[j];
    for (std::size_t i = 0; i < gb.size(); ++i) u[i] += c * solutions[j][i];
  }
  if (coeffs.direct_term != cd(0.0, 0.0))
    for (std::size_t i = 0; i < gb.size(); ++i) u[i] += coeffs.direct_term * gb[i];
  return u;
}

}  // namespace rfeig
