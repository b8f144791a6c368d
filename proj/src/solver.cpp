// SPDX-License-Identifier: Apache-2.0
#include "rfeig/solver.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "rfeig/rng.hpp"

namespace rfeig {

void SolverConfig::validate() const {
  if (region.radius <= 0.0) throw std::invalid_argument("config: radius must be positive");
  if (effective_n_col() == 0) throw std::invalid_argument("config: n_col (or s_estimate) required");
  if (s_estimate > 0 && effective_n_col() < s_estimate)
    throw std::invalid_argument("config: n_col must be >= s_estimate");
  if (!(tau < tau_ghost)) throw std::invalid_argument("config: tau must be < tau_ghost");
  if (k1 == 0) throw std::invalid_argument("config: k1 must be >= 1");
  if (adaptive) {
    std::size_t m = k1;
    while (m < k2_max) m *= 2;
    if (m != k2_max)
      throw std::invalid_argument("config: k2_max must be a power-of-two multiple of k1");
  } else if (k2 == 0) {
    throw std::invalid_argument("config: k2 must be >= 1");
  }
}

std::vector<std::size_t> ghost_filter(const std::vector<cd>& lambdas,
                                      const std::vector<double>& residuals,
                                      const DiskRegion& region, double tau_ghost) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!std::isfinite(lambdas[i].real()) || !std::isfinite(lambdas[i].imag())) continue;
    if (region.contains(lambdas[i]) && residuals[i] < tau_ghost) keep.push_back(i);
  }
  return keep;
}

bool check_convergence(const IterationTrace& trace, double tau, std::size_t history) {
  const auto& recs = trace.records;
  if (history == 0) history = 1;
  if (recs.size() < history) return false;
  std::size_t p = recs.back().p;
  if (p == 0) return false;
  for (std::size_t i = 1; i < history; ++i)
    if (recs[recs.size() - 1 - i].p != p) return false;
  return recs.back().max_filtered_residual <= tau;
}

namespace {

struct ProjectionResult {
  DenseMatrix V, W;
  ReducedEigResult red;
  DenseMatrix X;  // right Ritz vectors in the full space
  std::vector<double> residuals;
};

ProjectionResult project(const MatrixPencil& pencil, const SolverConfig& cfg,
                         const DenseMatrix& u) {
  ProjectionResult pr;
  pr.V = orth(u, 1e-12);
  if (cfg.s_estimate > 0 && pr.V.cols() < cfg.s_estimate)
    throw NumericalError("subspace rank collapsed below the eigenvalue count estimate");
  DenseMatrix av = spmv_block(pencil.A, pr.V);
  DenseMatrix bv = spmv_block(pencil.B, pr.V);
  cd sigma = cfg.effective_sigma();
  pr.W = orth(av - scale(bv, sigma), 1e-12);
  if (pr.W.cols() != pr.V.cols())
    throw NumericalError("projection rank collapse: W and V dimension mismatch");
  DenseMatrix m_a = adjoint_matmul(pr.W, av);
  DenseMatrix m_b = adjoint_matmul(pr.W, bv);
  pr.red = reduced_solve(m_a, m_b);
  pr.X = matmul(pr.V, pr.red.V_R);
  const std::size_t m = pr.X.cols();
  pr.residuals.assign(m, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < m; ++i) {
    if (pr.red.betas[i] == cd(0.0, 0.0)) continue;  // infinite eigenvalue
    try {
      pr.residuals[i] = relative_residual(pencil, cfg.region, pr.red.lambdas[i], pr.X.col_vec(i));
    } catch (const NumericalError&) {
      // B x == 0: leave the residual infinite
    }
  }
  return pr;
}

ComplexSparseMatrix conj_transpose(const ComplexSparseMatrix& m) {
  ComplexSparseMatrix t = m.transpose();
  for (cd& v : t.values) v = std::conj(v);
  return t;
}

double left_residual(const ComplexSparseMatrix& ah, const ComplexSparseMatrix& bh, cd lambda,
                     const std::vector<cd>& y, double rscale) {
  // || y^* A - lambda y^* B || == || A^H y - conj(lambda) B^H y ||
  std::vector<cd> ay = spmv(ah, y);
  std::vector<cd> by = spmv(bh, y);
  double rn = 0.0, bn = 0.0;
  for (std::size_t l = 0; l < y.size(); ++l) {
    rn += std::norm(ay[l] - std::conj(lambda) * by[l]);
    bn += std::norm(by[l]);
  }
  return std::sqrt(rn) / (rscale * std::sqrt(bn));
}

void finalize_report(EigenReport& report, const MatrixPencil& pencil, const SolverConfig& cfg,
                     const ProjectionResult& pr, const std::vector<std::size_t>& keep) {
  const std::size_t n = pencil.dim();
  report.eigenvalues.clear();
  report.residuals.clear();
  report.left_residuals.clear();
  report.right_vectors = DenseMatrix(n, keep.size());
  report.left_vectors = DenseMatrix(n, keep.size());
  DenseMatrix wl = matmul(pr.W, pr.red.V_L);
  // adjoint pencil for left-vector residuals and refinement
  MatrixPencil adj;
  adj.A = conj_transpose(pencil.A);
  adj.B = conj_transpose(pencil.B);
  const double rscale = std::abs(cfg.region.center) + cfg.region.radius;
  for (std::size_t c = 0; c < keep.size(); ++c) {
    std::size_t i = keep[c];
    cd lambda = pr.red.lambdas[i];
    report.eigenvalues.push_back(lambda);
    report.residuals.push_back(pr.residuals[i]);
    std::vector<cd> x = pr.X.col_vec(i);
    double xn = vec_norm(x);
    for (cd& v : x) v /= xn;
    report.right_vectors.set_col(c, x);
    std::vector<cd> y = wl.col_vec(i);
    double yn = vec_norm(y);
    for (cd& v : y) v /= yn;
    // The projected left Schur vectors only annihilate the residual inside
    // the search space; sharpen them by inverse iteration on the adjoint
    // pencil at the converged eigenvalue.
    double lres = left_residual(adj.A, adj.B, lambda, y, rscale);
    for (int pass = 0; pass < 3 && lres > 1e-9; ++pass) {
      cd pole = std::conj(lambda);
      try {
        ShiftedFactor f = factorize_shifted(adj, pole);
        // solves (conj(lambda) B^H - A^H) y' = y; sign is irrelevant for
        // the eigendirection
        std::vector<cd> y2 = f.solve(y);
        double n2 = vec_norm(y2);
        if (!(n2 > 0.0) || !std::isfinite(n2)) break;
        for (cd& v : y2) v /= n2;
        double lres2 = left_residual(adj.A, adj.B, lambda, y2, rscale);
        if (lres2 >= lres) break;
        y = std::move(y2);
        lres = lres2;
      } catch (const NumericalError&) {
        break;  // exactly singular shift: keep the projected vector
      }
    }
    report.left_vectors.set_col(c, y);
    report.left_residuals.push_back(lres);
  }
}

DenseMatrix random_orthonormal(std::size_t n, std::size_t n_col, std::uint64_t seed) {
  CounterRng rng(seed);
  DenseMatrix y(n, n_col);
  for (std::size_t j = 0; j < n_col; ++j)
    for (std::size_t i = 0; i < n; ++i) y(i, j) = rng.gaussian_complex();
  return orth(y, 1e-12);
}

}  // namespace

EigenReport subspace_iterate(const FilterFn& filter, const MatrixPencil& pencil,
                             const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t n_col = cfg.effective_n_col();
  if (n_col > pencil.dim()) throw std::invalid_argument("n_col exceeds problem dimension");
  DenseMatrix y = random_orthonormal(pencil.dim(), n_col, cfg.seed);

  EigenReport report;
  for (std::size_t t = 1; t <= cfg.max_outer; ++t) {
    IterationRecord rec;
    rec.t = t;
    DenseMatrix u = filter(y, rec);
    ProjectionResult pr = project(pencil, cfg, u);
    std::vector<std::size_t> keep =
        ghost_filter(pr.red.lambdas, pr.residuals, cfg.region, cfg.tau_ghost);
    rec.p = keep.size();
    rec.residuals = pr.residuals;
    rec.max_filtered_residual = 0.0;
    for (std::size_t i : keep)
      rec.max_filtered_residual = std::max(rec.max_filtered_residual, pr.residuals[i]);
    report.trace.records.push_back(rec);
    if (check_convergence(report.trace, cfg.tau, 2)) {
      finalize_report(report, pencil, cfg, pr, keep);
      report.converged = true;
      return report;
    }
    if (t == cfg.max_outer) {
      finalize_report(report, pencil, cfg, pr, keep);
      report.converged = false;
      return report;
    }
    y = pr.X;
  }
  return report;  // unreachable
}

EigenReport solve_simple(const MatrixPencil& pencil, const SolverConfig& cfg) {
  PolesWeights pw = trapezoid_rule(cfg.region, cfg.k1);
  InnerFilterOperator op(pencil, pw, cfg.n_threads);
  FilterFn filter = [&](const DenseMatrix& y, IterationRecord& rec) {
    DenseMatrix u = op.apply_block(y);
    rec.cum_columns_applied = op.column_count();
    return u;
  };
  EigenReport report = subspace_iterate(filter, pencil, cfg);
  report.trace.factorizations = cfg.k1;
  return report;
}

EigenReport solve_fixed_composite(const MatrixPencil& pencil, const SolverConfig& cfg) {
  PolesWeights pw = trapezoid_rule(cfg.region, cfg.k1);
  InnerFilterOperator op(pencil, pw, cfg.n_threads);
  CompositeCoeffs coeffs = composite_coeffs(cfg.k2);
  FilterFn filter = [&](const DenseMatrix& y, IterationRecord& rec) {
    rec.k2 = cfg.k2;
    DenseMatrix ytilde = op.apply_block(y);
    DenseMatrix u(y.rows(), y.cols());
    for (std::size_t j = 0; j < y.cols(); ++j) {
      std::vector<cd> b = ytilde.col_vec(j);
      std::vector<std::vector<cd>> sols;
      std::uint64_t its = 0;
      if (!coeffs.shifts.empty()) {
        MultiShiftGmres ms(op, b, cfg.gmres_tol, cfg.gmres_max_iter);
        ms.add_shifts(coeffs.shifts);
        ms.run();
        for (std::size_t l = 0; l < coeffs.shifts.size(); ++l) {
          ShiftSolution sol = ms.shift_result(l);
          if (!sol.converged) {
            std::ostringstream os;
            os << "multi-shift GMRES failed to reach " << cfg.gmres_tol << " for shift ("
               << sol.shift.real() << ", " << sol.shift.imag() << ") on column " << j;
            throw NumericalError(os.str());
          }
          sols.push_back(std::move(sol.x));
        }
        its = ms.op_applications();
      }
      u.set_col(j, combine_solutions(sols, coeffs, b));
      rec.gmres_iters.push_back(its);
      rec.gmres_total += its;
    }
    rec.cum_columns_applied = op.column_count();
    return u;
  };
  EigenReport report = subspace_iterate(filter, pencil, cfg);
  report.trace.factorizations = cfg.k1;
  return report;
}

EigenReport solve_adaptive(const MatrixPencil& pencil, const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t n_col = cfg.effective_n_col();
  if (n_col > pencil.dim()) throw std::invalid_argument("n_col exceeds problem dimension");
  PolesWeights pw = trapezoid_rule(cfg.region, cfg.k1);
  InnerFilterOperator op(pencil, pw, cfg.n_threads);

  DenseMatrix y = random_orthonormal(pencil.dim(), n_col, cfg.seed);
  // The basis is filtered through G exactly once; every further refinement
  // happens on the outer shifts.
  DenseMatrix ytilde = op.apply_block(y);

  std::vector<std::unique_ptr<MultiShiftGmres>> ms;
  ms.reserve(n_col);
  for (std::size_t j = 0; j < n_col; ++j)
    ms.push_back(std::make_unique<MultiShiftGmres>(op, ytilde.col_vec(j), cfg.gmres_tol,
                                                   cfg.gmres_max_iter));

  EigenReport report;
  report.trace.factorizations = cfg.k1;
  std::size_t k2 = cfg.k1;
  std::size_t t = 0;
  while (k2 <= cfg.k2_max) {
    ++t;
    CompositeCoeffs coeffs = composite_coeffs(k2);
    IterationRecord rec;
    rec.t = t;
    rec.k2 = k2;
    DenseMatrix u(pencil.dim(), n_col);
    for (std::size_t j = 0; j < n_col; ++j) {
      std::vector<std::size_t> idx = ms[j]->add_shifts(coeffs.shifts);
      ms[j]->run();
      std::vector<std::vector<cd>> sols;
      for (std::size_t l : idx) {
        ShiftSolution sol = ms[j]->shift_result(l);
        if (!sol.converged) {
          std::ostringstream os;
          os << "multi-shift GMRES failed to reach " << cfg.gmres_tol << " for shift ("
             << sol.shift.real() << ", " << sol.shift.imag() << ") on column " << j
             << " at outer order " << k2;
          throw NumericalError(os.str());
        }
        sols.push_back(std::move(sol.x));
      }
      // exact recombination over the full current shift set; the shared basis
      // makes this cost-free in operator applications
      u.set_col(j, combine_solutions(sols, coeffs, ytilde.col_vec(j)));
      rec.gmres_iters.push_back(ms[j]->op_applications());
      rec.gmres_total += ms[j]->op_applications();
    }
    rec.cum_columns_applied = op.column_count();

    ProjectionResult pr = project(pencil, cfg, u);
    std::vector<std::size_t> keep =
        ghost_filter(pr.red.lambdas, pr.residuals, cfg.region, cfg.tau_ghost);
    rec.p = keep.size();
    rec.residuals = pr.residuals;
    rec.max_filtered_residual = 0.0;
    for (std::size_t i : keep)
      rec.max_filtered_residual = std::max(rec.max_filtered_residual, pr.residuals[i]);
    report.trace.records.push_back(rec);
    // one good round suffices: p and residual stability within a single
    // doubling round terminates the escalation
    if (check_convergence(report.trace, cfg.tau, 1)) {
      finalize_report(report, pencil, cfg, pr, keep);
      report.converged = true;
      return report;
    }
    if (k2 == cfg.k2_max || t >= cfg.max_outer) {
      finalize_report(report, pencil, cfg, pr, keep);
      report.converged = false;
      return report;
    }
    k2 *= 2;
  }
  return report;  // unreachable
}

}  // namespace rfeig
