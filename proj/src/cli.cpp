// SPDX-License-Identifier: Apache-2.0
#include "rfeig/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfeig/report.hpp"
#include "rfeig/solver.hpp"

namespace rfeig {

namespace fs = std::filesystem;
using nlohmann::json;

cd parse_complex(const std::string& s) {
  const char* p = s.c_str();
  char* end = nullptr;
  double first = std::strtod(p, &end);
  if (end == p) throw ParseError("bad complex literal: " + s);
  if (*end == '\0') return cd(first, 0.0);
  if (*end == 'i' && end[1] == '\0') return cd(0.0, first);
  char* end2 = nullptr;
  double second = std::strtod(end, &end2);
  if (end2 == end || *end2 != 'i' || end2[1] != '\0')
    throw ParseError("bad complex literal: " + s);
  return cd(first, second);
}

std::vector<cd> parse_complex_list(const std::string& s) {
  std::vector<cd> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) out.push_back(parse_complex(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

namespace {

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open for writing: " + path);
  f << text;
}

struct SolveArgs {
  std::string matrix_a, matrix_b;
  std::string mode = "simple";
  std::string center_str, sigma_str;
  SolverConfig cfg;
  std::string config_path;
  std::string report_path, trace_path, manifest_path;
};

// Flat key=value file applied through the parsed option set; keys name the
// long options without dashes.  Options already given on the command line win.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open config file: " + path);
  std::string line;
  long lineno = 0;
  auto trim = [](std::string s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(f, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line is not key=value", lineno);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    CLI::Option* op = cmd->get_option_no_throw("--" + key);
    if (op == nullptr) throw ParseError("unknown config key: " + key, lineno);
    if (op->count() > 0) continue;  // command line wins
    op->add_result(val);
    op->run_callback();
  }
}

void add_solver_flags(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("matrix_a", a.matrix_a, "Matrix Market file for A")->required();
  cmd->add_option("matrix_b", a.matrix_b, "Matrix Market file for B")->required();
  cmd->add_option("--center", a.center_str, "region center (complex literal)")->required();
  cmd->add_option("--radius", a.cfg.region.radius, "region radius")->required();
  cmd->add_option("-s,--s-estimate", a.cfg.s_estimate, "estimated eigenvalue count in region");
  cmd->add_option("--rho", a.cfg.rho, "oversampling factor (n_col = floor(rho*s))");
  cmd->add_option("--ncol", a.cfg.n_col, "subspace column count (overrides rho*s)");
  cmd->add_option("--k1", a.cfg.k1, "inner filter order (direct-solved poles)");
  cmd->add_option("--k2", a.cfg.k2, "outer filter order (GMRES shifts)");
  cmd->add_option("--k2-max", a.cfg.k2_max, "adaptive-mode outer order cap");
  cmd->add_option("--tol", a.cfg.tau, "target residual");
  cmd->add_option("--ghost-tol", a.cfg.tau_ghost, "spurious-pair rejection threshold");
  cmd->add_option("--gmres-tol", a.cfg.gmres_tol, "inner GMRES relative tolerance");
  cmd->add_option("--gmres-max-iter", a.cfg.gmres_max_iter, "inner GMRES iteration cap");
  cmd->add_option("--sigma", a.sigma_str, "projection shift (complex literal)");
  cmd->add_option("--seed", a.cfg.seed, "random seed");
  cmd->add_option("--max-outer", a.cfg.max_outer, "outer iteration cap");
  cmd->add_option("--threads", a.cfg.n_threads, "filter worker threads");
  cmd->add_option("--config", a.config_path, "flat key=value config file; command line wins");
}

MatrixPencil load_pencil(const SolveArgs& a) {
  MatrixPencil p;
  p.A = load_matrix_market(a.matrix_a);
  p.B = load_matrix_market(a.matrix_b);
  p.validate();
  return p;
}

void finish_config(SolveArgs& a) {
  a.cfg.region.center = parse_complex(a.center_str);
  if (!a.sigma_str.empty()) {
    a.cfg.sigma = parse_complex(a.sigma_str);
    a.cfg.sigma_set = true;
  }
  if (a.mode != "simple" && a.mode != "composite" && a.mode != "adaptive")
    throw std::invalid_argument("unknown mode: " + a.mode);
  a.cfg.adaptive = (a.mode == "adaptive");
  if (a.cfg.s_estimate == 0 && a.cfg.n_col == 0)
    throw std::invalid_argument("one of --s-estimate or --ncol is required");
  if (a.cfg.adaptive) {
    // cap must be a power-of-two multiple of the starting order
    std::size_t m = a.cfg.k1;
    while (m < a.cfg.k2_max) m *= 2;
    if (m != a.cfg.k2_max) a.cfg.k2_max = m;
  }
  a.cfg.validate();
}

EigenReport dispatch_solver(const MatrixPencil& pencil, const SolveArgs& a) {
  if (a.mode == "composite") return solve_fixed_composite(pencil, a.cfg);
  if (a.mode == "adaptive") return solve_adaptive(pencil, a.cfg);
  return solve_simple(pencil, a.cfg);
}

int cmd_solve(SolveArgs& a, std::ostream& out) {
  finish_config(a);
  MatrixPencil pencil = load_pencil(a);
  EigenReport rep = dispatch_solver(pencil, a);
  if (!a.report_path.empty()) write_text(a.report_path, report_to_json(rep).dump(2) + "\n", out);
  if (!a.trace_path.empty()) write_text(a.trace_path, trace_to_csv(rep.trace), out);
  if (!a.manifest_path.empty()) {
    RunManifest m;
    m.command = "solve";
    m.config = a.cfg;
    m.input_paths = {a.matrix_a, a.matrix_b};
    for (const std::string* p : {&a.report_path, &a.trace_path, &a.manifest_path})
      if (!p->empty()) m.output_paths.push_back(*p);
    m.seed = a.cfg.seed;
    write_text(a.manifest_path, manifest_to_json(m).dump(2) + "\n", out);
  }
  out << (rep.converged ? "converged" : "not converged") << ": " << rep.eigenvalues.size()
      << " eigenpairs in " << rep.trace.records.size() << " iterations\n";
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
    out << "  " << fmt17(rep.eigenvalues[i].real()) << " " << fmt17(rep.eigenvalues[i].imag())
        << "i  residual " << fmt17(rep.residuals[i]) << "\n";
  return rep.converged ? exit_ok : exit_not_converged;
}

struct GenArgs {
  std::size_t nx = 10;
  std::uint64_t seed = 0;
  std::string inside_str, outside_str;
  std::string out_dir = ".";
};

int cmd_gen_powergrid(const GenArgs& g, std::ostream& out) {
  MatrixPencil p = gen_power_grid(g.nx, g.seed);
  fs::create_directories(g.out_dir);
  std::string pa = (fs::path(g.out_dir) / "A.mtx").string();
  std::string pb = (fs::path(g.out_dir) / "B.mtx").string();
  write_matrix_market(p.A, pa);
  write_matrix_market(p.B, pb);
  out << "wrote " << pa << " and " << pb << " (dim " << p.dim() << ")\n";
  return exit_ok;
}

int cmd_gen_spectrum(const GenArgs& g, std::ostream& out) {
  std::vector<cd> inside = parse_complex_list(g.inside_str);
  std::vector<cd> outside = parse_complex_list(g.outside_str);
  if (inside.empty()) throw std::invalid_argument("--inside must list at least one eigenvalue");
  SpectrumPencil sp = gen_spectrum_pencil(inside, outside, g.seed);
  fs::create_directories(g.out_dir);
  std::string pa = (fs::path(g.out_dir) / "A.mtx").string();
  std::string pb = (fs::path(g.out_dir) / "B.mtx").string();
  std::string pt = (fs::path(g.out_dir) / "truth.json").string();
  write_matrix_market(sp.pencil.A, pa);
  write_matrix_market(sp.pencil.B, pb);
  json ev = json::array();
  for (cd l : sp.eigenvalues) ev.push_back(json::array({l.real(), l.imag()}));
  json truth{{"schema", 1},
             {"eigenvalues", std::move(ev)},
             {"inside_count", inside.size()},
             {"seed", g.seed}};
  write_text(pt, truth.dump(2) + "\n", out);
  out << "wrote " << pa << ", " << pb << ", " << pt << " (dim " << sp.pencil.dim() << ")\n";
  return exit_ok;
}

struct AnalyzeArgs {
  std::string rule = "trapezoid";
  std::vector<std::size_t> ks;
  double a = 1.0, b = 1.1;
  std::size_t grid = 0;
  std::string out_path = "-";
  std::string map_path;
};

int cmd_analyze_filter(const AnalyzeArgs& an, std::ostream& out) {
  if (!(0.0 < an.a && an.a < an.b)) throw std::invalid_argument("need 0 < a < b");
  if (an.rule != "trapezoid" && an.rule != "gauss" && an.rule != "zolotarev")
    throw std::invalid_argument("unknown rule: " + an.rule);
  DiskRegion unit{cd(0.0, 0.0), 1.0};
  std::string csv = "rule,k,ratio,optimal_ratio\n";
  for (std::size_t k : an.ks) {
    double ratio;
    if (an.rule == "trapezoid") {
      ratio = an.grid ? separation_ratio_grid(trapezoid_rule(unit, k), an.a, an.b, an.grid)
                      : separation_ratio_closed(an.a, an.b, k);
    } else if (an.rule == "gauss") {
      ratio = separation_ratio_grid(gauss_rule(unit, k), an.a, an.b, an.grid ? an.grid : 1000);
    } else {
      ratio = zolotarev_infimum(zolotarev_params(an.a, an.b), k);
    }
    csv += an.rule + "," + std::to_string(k) + "," + fmt17(ratio) + "," +
           fmt17(optimal_ratio(an.a, an.b, k)) + "\n";
  }
  write_text(an.out_path, csv, out);
  if (!an.map_path.empty()) {
    std::size_t n = an.grid ? an.grid : 101;
    std::string map_csv = "rule,k,re,im,abs_r\n";
    ZolotarevParams zp = zolotarev_params(an.a, an.b);
    for (std::size_t k : an.ks) {
      PolesWeights pw;
      if (an.rule == "trapezoid")
        pw = trapezoid_rule(unit, k);
      else if (an.rule == "gauss")
        pw = gauss_rule(unit, k);
      for (std::size_t iy = 0; iy < n; ++iy) {
        for (std::size_t ix = 0; ix < n; ++ix) {
          double x = -1.5 + 3.0 * static_cast<double>(ix) / static_cast<double>(n - 1);
          double y = -1.5 + 3.0 * static_cast<double>(iy) / static_cast<double>(n - 1);
          cd z(x, y);
          double av;
          try {
            av = std::abs(an.rule == "zolotarev" ? zolotarev_eval(zp, k, z) : eval_sum(pw, z));
          } catch (const NumericalError&) {
            continue;  // on-pole grid point
          }
          map_csv += an.rule + "," + std::to_string(k) + "," + fmt17(x) + "," + fmt17(y) + "," +
                     fmt17(av) + "\n";
        }
      }
    }
    write_text(an.map_path, map_csv, out);
  }
  return exit_ok;
}

struct BenchArgs {
  SolveArgs solve;
  std::vector<std::string> modes{"simple", "composite", "adaptive"};
  std::string out_path = "-";
};

int cmd_bench(BenchArgs& b, std::ostream& out) {
  MatrixPencil pencil;
  json per_mode = json::object();
  bool loaded = false;
  for (const std::string& mode : b.modes) {
    SolveArgs a = b.solve;
    a.mode = mode;
    finish_config(a);
    if (!loaded) {
      pencil = load_pencil(a);
      loaded = true;
    }
    auto t0 = std::chrono::steady_clock::now();
    EigenReport rep = dispatch_solver(pencil, a);
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const IterationRecord* last =
        rep.trace.records.empty() ? nullptr : &rep.trace.records.back();
    std::uint64_t gmres_total = 0;
    for (const IterationRecord& r : rep.trace.records) gmres_total += r.gmres_total;
    per_mode[mode] = json{{"converged", rep.converged},
                          {"eigenvalues_found", rep.eigenvalues.size()},
                          {"outer_iterations", rep.trace.records.size()},
                          {"factorizations", rep.trace.factorizations},
                          {"columns_applied", last ? last->cum_columns_applied : 0},
                          {"gmres_iterations", gmres_total},
                          {"final_k2", last ? last->k2 : 0},
                          {"wall_time_s", dt}};
  }
  json result{{"schema", 1},
              {"matrix_a", b.solve.matrix_a},
              {"matrix_b", b.solve.matrix_b},
              {"modes", std::move(per_mode)}};
  write_text(b.out_path, result.dump(2) + "\n", out);
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rational-filter interior eigensolver for sparse matrix pencils"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate test pencils");
  gen->require_subcommand(1);
  CLI::App* pg = gen->add_subcommand("powergrid", "quasi-2D power-grid circuit pencil");
  pg->add_option("--nx", gen_args.nx, "grid side length")->check(CLI::PositiveNumber);
  pg->add_option("--seed", gen_args.seed, "random seed");
  pg->add_option("--out", gen_args.out_dir, "output directory");
  CLI::App* spec_cmd = gen->add_subcommand("spectrum", "pencil with prescribed eigenvalues");
  spec_cmd->add_option("--inside", gen_args.inside_str, "comma-separated interior eigenvalues")
      ->required();
  spec_cmd->add_option("--outside", gen_args.outside_str, "comma-separated exterior eigenvalues");
  spec_cmd->add_option("--seed", gen_args.seed, "random seed");
  spec_cmd->add_option("--out", gen_args.out_dir, "output directory");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "find eigenpairs inside a disk");
  solve->add_option("--mode", solve_args.mode, "simple|composite|adaptive");
  add_solver_flags(solve, solve_args);
  solve->add_option("--report", solve_args.report_path, "report JSON output path");
  solve->add_option("--trace", solve_args.trace_path, "iteration trace CSV output path");
  solve->add_option("--manifest", solve_args.manifest_path, "run manifest JSON output path");

  AnalyzeArgs an_args;
  CLI::App* an = app.add_subcommand("analyze-filter", "filter separation-ratio tables");
  an->add_option("--rule", an_args.rule, "trapezoid|gauss|zolotarev");
  an->add_option("--k", an_args.ks, "filter orders")->required()->delimiter(',');
  an->add_option("--a", an_args.a, "annulus inner radius");
  an->add_option("--b", an_args.b, "annulus outer radius");
  an->add_option("--grid", an_args.grid, "grid resolution for estimates");
  an->add_option("--out", an_args.out_path, "ratio CSV path ('-' for stdout)");
  an->add_option("--map", an_args.map_path, "filter magnitude grid CSV path");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "operation-count accounting per mode");
  add_solver_flags(bench, bench_args.solve);
  bench->add_option("--modes", bench_args.modes, "modes to run")->delimiter(',');
  bench->add_option("--out", bench_args.out_path, "accounting JSON path ('-' for stdout)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return exit_ok;
    }
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (pg->parsed()) return cmd_gen_powergrid(gen_args, out);
    if (spec_cmd->parsed()) return cmd_gen_spectrum(gen_args, out);
    if (solve->parsed()) {
      if (!solve_args.config_path.empty()) apply_config_file(solve, solve_args.config_path);
      return cmd_solve(solve_args, out);
    }
    if (an->parsed()) return cmd_analyze_filter(an_args, out);
    if (bench->parsed()) {
      if (!bench_args.solve.config_path.empty())
        apply_config_file(bench, bench_args.solve.config_path);
      return cmd_bench(bench_args, out);
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical_error;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const DimensionError& e) {
    err << "input error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return exit_input_error;
  }
  err << "error: no subcommand\n";
  return exit_usage;
}

}  // namespace rfeig
