// SPDX-License-Identifier: Apache-2.0
#include "rfeig/pencil.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <Eigen/Dense>

#include "rfeig/rng.hpp"

namespace rfeig {

ComplexSparseMatrix ComplexSparseMatrix::from_triplets(
    std::size_t n_rows, std::size_t n_cols,
    std::vector<std::tuple<std::size_t, std::size_t, cd>> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const auto& a, const auto& b) {
              if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
              return std::get<1>(a) < std::get<1>(b);
            });
  ComplexSparseMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_offsets.assign(n_rows + 1, 0);
  bool have_prev = false;
  std::size_t pi = 0, pj = 0;
  for (const auto& [i, j, v] : triplets) {
    if (i >= n_rows || j >= n_cols) throw DimensionError("from_triplets: index out of range");
    if (have_prev && i == pi && j == pj) {
      m.values.back() += v;  // duplicate: sum
      continue;
    }
    m.col_indices.push_back(j);
    m.values.push_back(v);
    m.row_offsets[i + 1] = m.col_indices.size();
    pi = i;
    pj = j;
    have_prev = true;
  }
  // fill gaps for empty rows
  for (std::size_t i = 1; i <= n_rows; ++i)
    m.row_offsets[i] = std::max(m.row_offsets[i], m.row_offsets[i - 1]);
  return m;
}

ComplexSparseMatrix ComplexSparseMatrix::identity(std::size_t n) {
  ComplexSparseMatrix m;
  m.n_rows = m.n_cols = n;
  m.row_offsets.resize(n + 1);
  m.col_indices.resize(n);
  m.values.assign(n, cd(1.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    m.row_offsets[i] = i;
    m.col_indices[i] = i;
  }
  m.row_offsets[n] = n;
  return m;
}

ComplexSparseMatrix ComplexSparseMatrix::from_dense(const DenseMatrix& d) {
  std::vector<std::tuple<std::size_t, std::size_t, cd>> trip;
  trip.reserve(d.rows() * d.cols());
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d(i, j) != cd(0.0, 0.0)) trip.emplace_back(i, j, d(i, j));
  return from_triplets(d.rows(), d.cols(), std::move(trip));
}

DenseMatrix ComplexSparseMatrix::to_dense() const {
  DenseMatrix d(n_rows, n_cols);
  for (std::size_t i = 0; i < n_rows; ++i)
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
      d(i, col_indices[k]) = values[k];
  return d;
}

ComplexSparseMatrix ComplexSparseMatrix::transpose() const {
  std::vector<std::tuple<std::size_t, std::size_t, cd>> trip;
  trip.reserve(nnz());
  for (std::size_t i = 0; i < n_rows; ++i)
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k)
      trip.emplace_back(col_indices[k], i, values[k]);
  return from_triplets(n_cols, n_rows, std::move(trip));
}

void ComplexSparseMatrix::validate() const {
  if (row_offsets.size() != n_rows + 1) throw DimensionError("csr: row_offsets length");
  if (row_offsets[0] != 0 || row_offsets[n_rows] != col_indices.size() ||
      col_indices.size() != values.size())
    throw DimensionError("csr: offset/storage mismatch");
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (row_offsets[i + 1] < row_offsets[i]) throw DimensionError("csr: offsets not monotone");
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (col_indices[k] >= n_cols) throw DimensionError("csr: column index out of range");
      if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1])
        throw DimensionError("csr: columns not strictly increasing");
    }
  }
}

void MatrixPencil::validate() const {
  A.validate();
  B.validate();
  if (A.n_rows != A.n_cols || B.n_rows != B.n_cols || A.n_rows != B.n_rows)
    throw DimensionError("pencil: A and B must be square with identical dimensions");
}

// ---------------------------------------------------------------------------
// Matrix Market I/O

namespace {

enum class MmField { real, integer, complex_ };
enum class MmSymmetry { general, symmetric, hermitian, skew_symmetric };

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

ComplexSparseMatrix load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  ++lineno;
  std::istringstream hs(line);
  std::string banner, object, format, field_s, sym_s;
  hs >> banner >> object >> format >> field_s >> sym_s;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    throw ParseError("malformed MatrixMarket banner", lineno);
  if (lower(format) != "coordinate")
    throw ParseError("only coordinate format supported", lineno);
  MmField field;
  field_s = lower(field_s);
  if (field_s == "real") field = MmField::real;
  else if (field_s == "integer") field = MmField::integer;
  else if (field_s == "complex") field = MmField::complex_;
  else throw ParseError("unsupported field '" + field_s + "'", lineno);
  MmSymmetry sym;
  sym_s = lower(sym_s);
  if (sym_s == "general") sym = MmSymmetry::general;
  else if (sym_s == "symmetric") sym = MmSymmetry::symmetric;
  else if (sym_s == "hermitian") sym = MmSymmetry::hermitian;
  else if (sym_s == "skew-symmetric") sym = MmSymmetry::skew_symmetric;
  else throw ParseError("unsupported symmetry '" + sym_s + "'", lineno);

  // size line (skipping comments)
  std::size_t n_rows = 0, n_cols = 0, n_entries = 0;
  for (;;) {
    if (!std::getline(in, line)) throw ParseError("missing size line", lineno);
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> n_rows >> n_cols >> n_entries)) throw ParseError("malformed size line", lineno);
    break;
  }

  std::vector<std::tuple<std::size_t, std::size_t, cd>> trip;
  trip.reserve(n_entries * (sym == MmSymmetry::general ? 1 : 2));
  std::vector<std::tuple<std::size_t, std::size_t>> seen;
  seen.reserve(n_entries);
  for (std::size_t e = 0; e < n_entries; ++e) {
    if (!std::getline(in, line)) throw ParseError("unexpected end of file", lineno);
    ++lineno;
    std::istringstream ss(line);
    long i1 = 0, j1 = 0;
    if (!(ss >> i1 >> j1)) throw ParseError("malformed entry", lineno);
    double re = 0.0, im = 0.0;
    if (field == MmField::complex_) {
      if (!(ss >> re >> im)) throw ParseError("malformed complex entry", lineno);
    } else {
      if (!(ss >> re)) throw ParseError("malformed entry value", lineno);
    }
    if (i1 < 1 || j1 < 1 || static_cast<std::size_t>(i1) > n_rows ||
        static_cast<std::size_t>(j1) > n_cols)
      throw ParseError("index out of bounds", lineno);
    std::size_t i = static_cast<std::size_t>(i1) - 1;
    std::size_t j = static_cast<std::size_t>(j1) - 1;
    seen.emplace_back(i, j);
    cd v(re, im);
    trip.emplace_back(i, j, v);
    if (i != j) {
      switch (sym) {
        case MmSymmetry::general: break;
        case MmSymmetry::symmetric: trip.emplace_back(j, i, v); break;
        case MmSymmetry::hermitian: trip.emplace_back(j, i, std::conj(v)); break;
        case MmSymmetry::skew_symmetric: trip.emplace_back(j, i, -v); break;
      }
    }
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw ParseError("duplicate entry", lineno);

  auto m = ComplexSparseMatrix::from_triplets(n_rows, n_cols, std::move(trip));
  m.validate();
  return m;
}

void write_matrix_market(const ComplexSparseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << m.n_rows << " " << m.n_cols << " " << m.nnz() << "\n";
  // (col, row) sorted entries
  std::vector<std::tuple<std::size_t, std::size_t, cd>> entries;
  entries.reserve(m.nnz());
  for (std::size_t i = 0; i < m.n_rows; ++i)
    for (std::size_t k = m.row_offsets[i]; k < m.row_offsets[i + 1]; ++k)
      entries.emplace_back(m.col_indices[k], i, m.values[k]);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  char buf[128];
  for (const auto& [j, i, v] : entries) {
    std::snprintf(buf, sizeof(buf), "%zu %zu %.17g %.17g\n", i + 1, j + 1, v.real(), v.imag());
    out << buf;
  }
  if (!out) throw ParseError("write failure on " + path);
}

// ---------------------------------------------------------------------------
// Generators

namespace {

// Weighted 1D Laplacian (n/100) * tridiag(-1, 2, -1) with 1 at the corners.
void add_laplacian_kron(std::vector<std::tuple<std::size_t, std::size_t, cd>>& trip,
                        std::size_t n, double factor, std::size_t stride,
                        std::size_t blocks_outer, std::size_t inner) {
  // Adds factor * (I_outer (x) L_n (x) I_inner) where the L_n index advances
  // by `stride` in the flat node ordering.
  const double w = factor * static_cast<double>(n) / 100.0;
  for (std::size_t outer = 0; outer < blocks_outer; ++outer) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t in = 0; in < inner; ++in) {
        std::size_t idx = outer * (n * stride) + a * stride + in;
        double diag = (a == 0 || a == n - 1) ? 1.0 : 2.0;
        trip.emplace_back(idx, idx, cd(w * diag, 0.0));
        if (a + 1 < n) {
          std::size_t idx2 = idx + stride;
          trip.emplace_back(idx, idx2, cd(-w, 0.0));
          trip.emplace_back(idx2, idx, cd(-w, 0.0));
        }
      }
    }
  }
}

}  // namespace

MatrixPencil gen_power_grid(std::size_t n_x, std::uint64_t seed) {
  if (n_x < 2) throw std::invalid_argument("gen_power_grid: n_x must be >= 2");
  const std::size_t layers = 10;
  const std::size_t n_nodes = layers * n_x * n_x;
  const std::size_t n_ports = 20;
  const std::size_t n_ind = 2 * n_x * n_x;
  const std::size_t dim = n_nodes + n_ports + n_ind;

  // Node (i, j, l) with i, j in [0, n_x), l in [0, layers); flat index
  // matches L_{n_x} (x) I_{n_x} (x) I_10 + I (x) L_{n_x} (x) I_10 + (1/10) I (x) I (x) L_10.
  auto node = [&](std::size_t i, std::size_t j, std::size_t l) {
    return (i * n_x + j) * layers + l;
  };

  std::vector<std::tuple<std::size_t, std::size_t, cd>> gt;  // triplets of G
  // G11 terms
  add_laplacian_kron(gt, n_x, 1.0, n_x * layers, 1, n_x * layers);  // i-direction
  add_laplacian_kron(gt, n_x, 1.0, layers, n_x, layers);            // j-direction
  add_laplacian_kron(gt, layers, 0.1, 1, n_x * n_x, 1);             // layer direction

  // Ports: 10 on the (i, 0, 0) edge, 10 on the (i, n_x-1, 9) edge.
  for (std::size_t t = 0; t < 10; ++t) {
    std::size_t i = std::min(n_x - 1, t * n_x / 10);
    std::size_t col = n_nodes + t;
    gt.emplace_back(node(i, 0, 0), col, cd(1.0, 0.0));
    gt.emplace_back(col, node(i, 0, 0), cd(-1.0, 0.0));
    std::size_t col2 = n_nodes + 10 + t;
    gt.emplace_back(node(i, n_x - 1, layers - 1), col2, cd(1.0, 0.0));
    gt.emplace_back(col2, node(i, n_x - 1, layers - 1), cd(-1.0, 0.0));
  }

  // Inductors: uniformly chosen interior node joined to a uniformly chosen
  // same-layer 4-neighbor.  For n_x < 3 there is no interior; fall back to
  // the full layer grid.
  CounterRng rng(seed);
  std::vector<double> inductance(n_ind);
  const std::size_t lo = (n_x >= 3) ? 1 : 0;
  const std::size_t hi = (n_x >= 3) ? n_x - 1 : n_x;  // exclusive
  const std::size_t span = hi - lo;
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  for (std::size_t e = 0; e < n_ind; ++e) {
    std::size_t i = lo + rng.uniform_int(span);
    std::size_t j = lo + rng.uniform_int(span);
    std::size_t l = rng.uniform_int(layers);
    std::size_t d;
    std::size_t ni, nj;
    for (;;) {
      d = rng.uniform_int(4);
      long ti = static_cast<long>(i) + di[d];
      long tj = static_cast<long>(j) + dj[d];
      if (ti >= 0 && tj >= 0 && ti < static_cast<long>(n_x) && tj < static_cast<long>(n_x)) {
        ni = static_cast<std::size_t>(ti);
        nj = static_cast<std::size_t>(tj);
        break;
      }
    }
    std::size_t col = n_nodes + n_ports + e;
    gt.emplace_back(node(i, j, l), col, cd(1.0, 0.0));
    gt.emplace_back(node(ni, nj, l), col, cd(-1.0, 0.0));
    gt.emplace_back(col, node(i, j, l), cd(-1.0, 0.0));
    gt.emplace_back(col, node(ni, nj, l), cd(1.0, 0.0));
    inductance[e] = rng.uniform(0.5, 1.5) * static_cast<double>(n_x) * 1e-4;
  }

  std::vector<std::tuple<std::size_t, std::size_t, cd>> ct;
  for (std::size_t i = 0; i < n_nodes; ++i) ct.emplace_back(i, i, cd(1e-3, 0.0));
  // first 20 branch entries (ports) are zero and therefore omitted
  for (std::size_t e = 0; e < n_ind; ++e) {
    std::size_t idx = n_nodes + n_ports + e;
    ct.emplace_back(idx, idx, cd(inductance[e], 0.0));
  }

  // The quantities of interest are the circuit poles, i.e. eigenvalues of
  // (-G, C); with +G the spectrum would lie in the right half-plane.
  for (auto& t : gt) std::get<2>(t) = -std::get<2>(t);

  MatrixPencil p;
  p.A = ComplexSparseMatrix::from_triplets(dim, dim, std::move(gt));
  p.B = ComplexSparseMatrix::from_triplets(dim, dim, std::move(ct));
  p.validate();
  return p;
}

SpectrumPencil gen_spectrum_pencil(const std::vector<cd>& inside, const std::vector<cd>& outside,
                                   std::uint64_t seed) {
  std::vector<cd> lambda = inside;
  lambda.insert(lambda.end(), outside.begin(), outside.end());
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (std::size_t j = i + 1; j < lambda.size(); ++j)
      if (lambda[i] == lambda[j])
        throw std::invalid_argument("gen_spectrum_pencil: eigenvalue lists must be disjoint");
  const std::size_t n = lambda.size();
  if (n == 0) throw std::invalid_argument("gen_spectrum_pencil: empty spectrum");

  using EM = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>;
  for (int attempt = 0; attempt < 10; ++attempt) {
    CounterRng rng(seed + static_cast<std::uint64_t>(attempt));
    EM x(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.gaussian_complex();
    Eigen::PartialPivLU<EM> lu(x);
    const auto& u = lu.matrixLU();
    double dmin = 1e300, dmax = 0.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      double d = std::abs(u(i, i));
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }
    if (dmin < 1e-12 * dmax) continue;  // numerically singular; retry

    EM xl = x;
    for (std::size_t j = 0; j < n; ++j) xl.col(static_cast<Eigen::Index>(j)) *= lambda[j];
    // A = X Lambda X^{-1}  <=>  A^T = X^{-T} (X Lambda)^T
    EM at = x.transpose().partialPivLu().solve(xl.transpose());
    EM a = at.transpose();

    DenseMatrix ad(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        ad(i, j) = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));

    SpectrumPencil sp;
    sp.pencil.A = ComplexSparseMatrix::from_dense(ad);
    sp.pencil.B = ComplexSparseMatrix::identity(n);
    sp.eigenvalues = lambda;
    return sp;
  }
  throw NumericalError("gen_spectrum_pencil: eigenvector matrix singular after 10 attempts");
}

double relative_residual(const MatrixPencil& pencil, const DiskRegion& region, cd lambda,
                         const std::vector<cd>& x) {
  if (x.size() != pencil.dim()) throw DimensionError("relative_residual: vector size");
  std::vector<cd> ax = spmv(pencil.A, x);
  std::vector<cd> bx = spmv(pencil.B, x);
  double bn = vec_norm(bx);
  if (bn == 0.0) throw NumericalError("relative_residual: B x = 0 (defective direction)");
  double rn = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) rn += std::norm(ax[i] - lambda * bx[i]);
  return std::sqrt(rn) / ((std::abs(region.center) + region.radius) * bn);
}

std::vector<cd> spmv(const ComplexSparseMatrix& m, const std::vector<cd>& x) {
  if (x.size() != m.n_cols) throw DimensionError("spmv: dimension mismatch");
  std::vector<cd> y(m.n_rows, cd(0.0, 0.0));
  for (std::size_t i = 0; i < m.n_rows; ++i) {
    cd s(0.0, 0.0);
    for (std::size_t k = m.row_offsets[i]; k < m.row_offsets[i + 1]; ++k)
      s += m.values[k] * x[m.col_indices[k]];
    y[i] = s;
  }
  return y;
}

DenseMatrix spmv_block(const ComplexSparseMatrix& m, const DenseMatrix& x) {
  if (x.rows() != m.n_cols) throw DimensionError("spmv_block: dimension mismatch");
  DenseMatrix y(m.n_rows, x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const cd* xc = x.col(j);
    cd* yc = y.col(j);
    for (std::size_t i = 0; i < m.n_rows; ++i) {
      cd s(0.0, 0.0);
      for (std::size_t k = m.row_offsets[i]; k < m.row_offsets[i + 1]; ++k)
        s += m.values[k] * xc[m.col_indices[k]];
      yc[i] = s;
    }
  }
  return y;
}

}  // namespace rfeig
