// SPDX-License-Identifier: Apache-2.0
#include "rfeig/report.hpp"

#include <cstdio>

namespace rfeig {

using nlohmann::json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json complex_pair(cd z) { return json::array({z.real(), z.imag()}); }

cd pair_complex(const json& j) { return cd(j.at(0).get<double>(), j.at(1).get<double>()); }

json dense_to_json(const DenseMatrix& m) {
  json cols = json::array();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    json col = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) col.push_back(complex_pair(m(i, j)));
    cols.push_back(std::move(col));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(cols)}};
}

DenseMatrix dense_from_json(const json& j) {
  DenseMatrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const json& cols = j.at("data");
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = pair_complex(cols.at(c).at(r));
  return m;
}

}  // namespace

json report_to_json(const EigenReport& rep) {
  json ev = json::array();
  for (cd l : rep.eigenvalues) ev.push_back(complex_pair(l));
  json records = json::array();
  for (const IterationRecord& r : rep.trace.records) {
    records.push_back(json{{"t", r.t},
                           {"p", r.p},
                           {"max_filtered_residual", r.max_filtered_residual},
                           {"residuals", r.residuals},
                           {"gmres_iters", r.gmres_iters},
                           {"gmres_total", r.gmres_total},
                           {"cum_columns_applied", r.cum_columns_applied},
                           {"k2", r.k2}});
  }
  return json{{"schema", 1},
              {"converged", rep.converged},
              {"eigenvalues", std::move(ev)},
              {"residuals", rep.residuals},
              {"left_residuals", rep.left_residuals},
              {"right_vectors", dense_to_json(rep.right_vectors)},
              {"left_vectors", dense_to_json(rep.left_vectors)},
              {"trace",
               {{"factorizations", rep.trace.factorizations}, {"records", std::move(records)}}}};
}

EigenReport report_from_json(const json& j) {
  if (j.at("schema").get<int>() != 1) throw ParseError("report: unsupported schema version");
  EigenReport rep;
  rep.converged = j.at("converged").get<bool>();
  for (const json& p : j.at("eigenvalues")) rep.eigenvalues.push_back(pair_complex(p));
  rep.residuals = j.at("residuals").get<std::vector<double>>();
  rep.left_residuals = j.at("left_residuals").get<std::vector<double>>();
  rep.right_vectors = dense_from_json(j.at("right_vectors"));
  rep.left_vectors = dense_from_json(j.at("left_vectors"));
  const json& tr = j.at("trace");
  rep.trace.factorizations = tr.at("factorizations").get<std::size_t>();
  for (const json& r : tr.at("records")) {
    IterationRecord rec;
    rec.t = r.at("t").get<std::size_t>();
    rec.p = r.at("p").get<std::size_t>();
    rec.max_filtered_residual = r.at("max_filtered_residual").get<double>();
    rec.residuals = r.at("residuals").get<std::vector<double>>();
    rec.gmres_iters = r.at("gmres_iters").get<std::vector<std::size_t>>();
    rec.gmres_total = r.at("gmres_total").get<std::uint64_t>();
    rec.cum_columns_applied = r.at("cum_columns_applied").get<std::uint64_t>();
    rec.k2 = r.at("k2").get<std::size_t>();
    rep.trace.records.push_back(std::move(rec));
  }
  return rep;
}

std::string trace_to_csv(const IterationTrace& trace) {
  std::string out = "t,p,max_residual,k2,gmres_total\n";
  for (const IterationRecord& r : trace.records) {
    out += std::to_string(r.t) + "," + std::to_string(r.p) + "," + fmt17(r.max_filtered_residual) +
           "," + std::to_string(r.k2) + "," + std::to_string(r.gmres_total) + "\n";
  }
  return out;
}

bool RunManifest::operator==(const RunManifest& o) const {
  const SolverConfig &a = config, &b = o.config;
  return command == o.command && input_paths == o.input_paths && output_paths == o.output_paths &&
         seed == o.seed && a.region.center == b.region.center &&
         a.region.radius == b.region.radius && a.s_estimate == b.s_estimate && a.rho == b.rho &&
         a.n_col == b.n_col && a.k1 == b.k1 && a.k2 == b.k2 && a.adaptive == b.adaptive &&
         a.k2_max == b.k2_max && a.sigma == b.sigma && a.sigma_set == b.sigma_set &&
         a.tau == b.tau && a.tau_ghost == b.tau_ghost && a.gmres_tol == b.gmres_tol &&
         a.gmres_max_iter == b.gmres_max_iter && a.max_outer == b.max_outer && a.seed == b.seed &&
         a.n_threads == b.n_threads;
}

json manifest_to_json(const RunManifest& m) {
  const SolverConfig& c = m.config;
  json cfg{{"center", complex_pair(c.region.center)},
           {"radius", c.region.radius},
           {"s_estimate", c.s_estimate},
           {"rho", c.rho},
           {"n_col", c.n_col},
           {"k1", c.k1},
           {"k2", c.k2},
           {"adaptive", c.adaptive},
           {"k2_max", c.k2_max},
           {"sigma", complex_pair(c.sigma)},
           {"sigma_set", c.sigma_set},
           {"tau", c.tau},
           {"tau_ghost", c.tau_ghost},
           {"gmres_tol", c.gmres_tol},
           {"gmres_max_iter", c.gmres_max_iter},
           {"max_outer", c.max_outer},
           {"seed", c.seed},
           {"n_threads", c.n_threads}};
  return json{{"schema", 1},
              {"command", m.command},
              {"config", std::move(cfg)},
              {"input_paths", m.input_paths},
              {"output_paths", m.output_paths},
              {"seed", m.seed}};
}

RunManifest manifest_from_json(const json& j) {
  if (j.at("schema").get<int>() != 1) throw ParseError("manifest: unsupported schema version");
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.input_paths = j.at("input_paths").get<std::vector<std::string>>();
  m.output_paths = j.at("output_paths").get<std::vector<std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  const json& c = j.at("config");
  SolverConfig& cfg = m.config;
  cfg.region.center = pair_complex(c.at("center"));
  cfg.region.radius = c.at("radius").get<double>();
  cfg.s_estimate = c.at("s_estimate").get<std::size_t>();
  cfg.rho = c.at("rho").get<double>();
  cfg.n_col = c.at("n_col").get<std::size_t>();
  cfg.k1 = c.at("k1").get<std::size_t>();
  cfg.k2 = c.at("k2").get<std::size_t>();
  cfg.adaptive = c.at("adaptive").get<bool>();
  cfg.k2_max = c.at("k2_max").get<std::size_t>();
  cfg.sigma = pair_complex(c.at("sigma"));
  cfg.sigma_set = c.at("sigma_set").get<bool>();
  cfg.tau = c.at("tau").get<double>();
  cfg.tau_ghost = c.at("tau_ghost").get<double>();
  cfg.gmres_tol = c.at("gmres_tol").get<double>();
  cfg.gmres_max_iter = c.at("gmres_max_iter").get<std::size_t>();
  cfg.max_outer = c.at("max_outer").get<std::size_t>();
  cfg.seed = c.at("seed").get<std::uint64_t>();
  cfg.n_threads = c.at("n_threads").get<int>();
  return m;
}

}  // namespace rfeig
