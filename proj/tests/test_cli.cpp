// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rfeig/cli.hpp"
#include "rfeig/pencil.hpp"
#include "rfeig/report.hpp"

using namespace rfeig;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("rfeig-cli-tests-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// toy pencil with two interior and one exterior eigenvalue
fs::path gen_toy(const std::string& name, const std::string& seed) {
  fs::path dir = scratch_dir(name);
  auto r = run({"gen", "spectrum", "--inside", "0,0.75", "--outside", "1.189+1.189i", "--seed",
                seed, "--out", dir.string()});
  REQUIRE(r.code == 0);
  return dir;
}

std::vector<std::string> toy_solve_args(const fs::path& dir) {
  return {"solve",    (dir / "A.mtx").string(),
          (dir / "B.mtx").string(),
          "--center", "0",
          "--radius", "1",
          "--ncol",   "2",
          "--k1",     "16",
          "--seed",   "7"};
}

}  // namespace

TEST_CASE("complex literal parsing") {
  CHECK(parse_complex("1.5") == cd(1.5, 0));
  CHECK(parse_complex("-2e3+4.5i") == cd(-2000, 4.5));
  CHECK(parse_complex("1.2i") == cd(0, 1.2));
  CHECK(parse_complex("3-2i") == cd(3, -2));
  CHECK(parse_complex("-260+1000i") == cd(-260, 1000));
  CHECK_THROWS_AS(parse_complex("abc"), ParseError);
  CHECK_THROWS_AS(parse_complex("1+2"), ParseError);
  CHECK_THROWS_AS(parse_complex("1i2"), ParseError);

  auto l = parse_complex_list("0,0.75,1.189+1.189i");
  REQUIRE(l.size() == 3);
  CHECK(l[1] == cd(0.75, 0));
  CHECK(l[2] == cd(1.189, 1.189));
  CHECK(parse_complex_list("").empty());
}

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 1);
  CHECK(run({"solve"}).code == 1);                      // missing required options
  CHECK(run({"frobnicate"}).code == 1);                 // unknown subcommand
  CHECK(run({"gen", "spectrum"}).code == 1);            // --inside required
  auto r = run({"solve", "a", "b", "--center", "0", "--radius", "1", "--bogus"});
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
}

TEST_CASE("spectrum generation is deterministic and loadable") {
  fs::path d1 = gen_toy("gen1", "3");
  fs::path d2 = gen_toy("gen2", "3");
  fs::path d3 = gen_toy("gen3", "4");
  CHECK(slurp(d1 / "A.mtx") == slurp(d2 / "A.mtx"));
  CHECK(slurp(d1 / "B.mtx") == slurp(d2 / "B.mtx"));
  CHECK(slurp(d1 / "A.mtx") != slurp(d3 / "A.mtx"));

  auto a = load_matrix_market((d1 / "A.mtx").string());
  CHECK(a.n_rows == 3);
  json truth = json::parse(slurp(d1 / "truth.json"));
  CHECK(truth["schema"] == 1);
  CHECK(truth["inside_count"] == 2);
  REQUIRE(truth["eigenvalues"].size() == 3);
  CHECK(truth["eigenvalues"][0][0].get<double>() == 0.0);
  CHECK(truth["eigenvalues"][1][0].get<double>() == 0.75);
}

TEST_CASE("power-grid generation writes the pencil files") {
  fs::path dir = scratch_dir("pg");
  auto r = run({"gen", "powergrid", "--nx", "3", "--seed", "1", "--out", dir.string()});
  CHECK(r.code == 0);
  auto a = load_matrix_market((dir / "A.mtx").string());
  auto b = load_matrix_market((dir / "B.mtx").string());
  CHECK(a.n_rows == 128);
  CHECK(b.n_rows == 128);
}

TEST_CASE("solve round trip: report, trace, manifest") {
  fs::path dir = gen_toy("solve", "3");
  auto args = toy_solve_args(dir);
  fs::path rep_path = dir / "report.json";
  fs::path trace_path = dir / "trace.csv";
  fs::path man_path = dir / "manifest.json";
  args.insert(args.end(), {"--report", rep_path.string(), "--trace", trace_path.string(),
                           "--manifest", man_path.string()});
  auto r = run(args);
  CHECK(r.code == 0);
  CHECK(r.out.find("converged") != std::string::npos);

  EigenReport rep = report_from_json(json::parse(slurp(rep_path)));
  CHECK(rep.converged);
  REQUIRE(rep.eigenvalues.size() == 2);
  for (double res : rep.residuals) CHECK(res <= 1e-8);
  std::vector<cd> ev = rep.eigenvalues;
  std::sort(ev.begin(), ev.end(), [](cd a, cd b) { return a.real() < b.real(); });
  CHECK(std::abs(ev[0] - cd(0, 0)) < 1e-8);
  CHECK(std::abs(ev[1] - cd(0.75, 0)) < 1e-8);
  CHECK(rep.right_vectors.rows() == 3);
  CHECK(rep.right_vectors.cols() == 2);

  std::string trace = slurp(trace_path);
  CHECK(trace.rfind("t,p,max_residual,k2,gmres_total\n", 0) == 0);
  CHECK(std::count(trace.begin(), trace.end(), '\n') ==
        1 + static_cast<long>(rep.trace.records.size()));

  RunManifest m = manifest_from_json(json::parse(slurp(man_path)));
  CHECK(m.command == "solve");
  CHECK(m.seed == 7);
  CHECK(m.config.k1 == 16);
  CHECK(m.config.n_col == 2);
  CHECK(m.input_paths == std::vector<std::string>{(dir / "A.mtx").string(),
                                                  (dir / "B.mtx").string()});
  // lossless round trip
  CHECK(manifest_from_json(manifest_to_json(m)) == m);
}

TEST_CASE("composite mode with unit outer order matches simple mode") {
  fs::path dir = gen_toy("k2one", "5");
  fs::path rep_s = dir / "simple.json";
  fs::path rep_c = dir / "composite.json";
  auto args = toy_solve_args(dir);
  auto a1 = args;
  a1.insert(a1.end(), {"--report", rep_s.string()});
  REQUIRE(run(a1).code == 0);
  auto a2 = args;
  a2.insert(a2.end(), {"--mode", "composite", "--k2", "1", "--report", rep_c.string()});
  REQUIRE(run(a2).code == 0);
  EigenReport rs = report_from_json(json::parse(slurp(rep_s)));
  EigenReport rc = report_from_json(json::parse(slurp(rep_c)));
  REQUIRE(rs.eigenvalues.size() == rc.eigenvalues.size());
  for (std::size_t i = 0; i < rs.eigenvalues.size(); ++i)
    CHECK(std::abs(rs.eigenvalues[i] - rc.eigenvalues[i]) < 1e-10);
}

TEST_CASE("exit codes for failure modes") {
  // missing input file
  auto r3 = run({"solve", "/nonexistent/A.mtx", "/nonexistent/B.mtx", "--center", "0", "--radius",
                 "1", "--ncol", "2"});
  CHECK(r3.code == 3);
  CHECK(!r3.err.empty());

  // iteration cap exhausted before the tolerance is met
  fs::path dir = gen_toy("noconv", "3");
  auto args = toy_solve_args(dir);
  args.insert(args.end(), {"--max-outer", "1", "--tol", "1e-14", "--ghost-tol", "1e-13"});
  CHECK(run(args).code == 2);

  // inner GMRES starved of iterations
  fs::path dir2 = scratch_dir("gmres-starved");
  REQUIRE(run({"gen", "spectrum", "--inside", "0,0.5i", "--outside", "2,2i,-2", "--seed", "9",
               "--out", dir2.string()})
              .code == 0);
  auto r4 = run({"solve", (dir2 / "A.mtx").string(), (dir2 / "B.mtx").string(), "--center", "0",
                 "--radius", "1", "--ncol", "2", "--mode", "composite", "--k1", "4", "--k2", "8",
                 "--gmres-max-iter", "1"});
  CHECK(r4.code == 4);
  CHECK(!r4.err.empty());

  // invalid mode name
  auto r5 = toy_solve_args(dir);
  r5.insert(r5.end(), {"--mode", "magic"});
  CHECK(run(r5).code == 3);
}

TEST_CASE("config file values apply and command line wins") {
  fs::path dir = gen_toy("cfgfile", "3");
  fs::path cfg = dir / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "k1=4\n";
    f << "tol=1e-9\n";
    f << "seed=5\n";
  }
  fs::path man_path = dir / "manifest.json";
  auto args = toy_solve_args(dir);  // sets --k1 16 and --seed 7 on the command line
  args.insert(args.end(), {"--config", cfg.string(), "--manifest", man_path.string()});
  REQUIRE(run(args).code == 0);
  RunManifest m = manifest_from_json(json::parse(slurp(man_path)));
  CHECK(m.config.k1 == 16);      // command line beats config file
  CHECK(m.config.seed == 7);
  CHECK(m.config.tau == 1e-9);   // config file beats default
}

TEST_CASE("filter analysis tables") {
  fs::path dir = scratch_dir("analyze");
  fs::path csv_path = dir / "ratios.csv";
  auto r = run({"analyze-filter", "--rule", "trapezoid", "--k", "8,16", "--a", "1", "--b", "1.1",
                "--out", csv_path.string()});
  REQUIRE(r.code == 0);
  std::istringstream csv(slurp(csv_path));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "rule,k,ratio,optimal_ratio");
  double ratio16 = 0, opt16 = 0;
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream ls(line);
    std::string rule, kf, ratiof, optf;
    std::getline(ls, rule, ',');
    std::getline(ls, kf, ',');
    std::getline(ls, ratiof, ',');
    std::getline(ls, optf, ',');
    CHECK(rule == "trapezoid");
    if (kf == "16") {
      ratio16 = std::stod(ratiof);
      opt16 = std::stod(optf);
    }
  }
  CHECK(rows == 2);
  CHECK(ratio16 == doctest::Approx(0.5563).epsilon(1e-3));
  CHECK(opt16 == doctest::Approx(0.2176).epsilon(1e-3));

  // magnitude map over the complex plane
  fs::path map_path = dir / "map.csv";
  auto r2 = run({"analyze-filter", "--rule", "trapezoid", "--k", "4", "--grid", "21", "--out", "-",
                 "--map", map_path.string()});
  REQUIRE(r2.code == 0);
  std::string map = slurp(map_path);
  CHECK(map.rfind("rule,k,re,im,abs_r\n", 0) == 0);
  CHECK(std::count(map.begin(), map.end(), '\n') >= 21 * 21 / 2);

  // bad annulus bounds
  CHECK(run({"analyze-filter", "--k", "8", "--a", "2", "--b", "1"}).code == 3);
}

TEST_CASE("bench accounting over all modes") {
  fs::path dir = gen_toy("bench", "3");
  fs::path out_path = dir / "bench.json";
  auto r = run({"bench", (dir / "A.mtx").string(), (dir / "B.mtx").string(), "--center", "0",
                "--radius", "1", "--ncol", "2", "--k1", "8", "--k2", "2", "--seed", "7", "--modes",
                "simple,composite", "--out", out_path.string()});
  REQUIRE(r.code == 0);
  json b = json::parse(slurp(out_path));
  CHECK(b["schema"] == 1);
  REQUIRE(b["modes"].contains("simple"));
  REQUIRE(b["modes"].contains("composite"));
  for (const char* mode : {"simple", "composite"}) {
    const json& m = b["modes"][mode];
    CHECK(m["converged"] == true);
    CHECK(m["eigenvalues_found"] == 2);
    CHECK(m["outer_iterations"].get<std::size_t>() >= 2);
    CHECK(m["columns_applied"].get<std::uint64_t>() > 0);
  }
  CHECK(b["modes"]["simple"]["factorizations"] == 8);
  CHECK(b["modes"]["composite"]["gmres_iterations"].get<std::uint64_t>() > 0);
  CHECK(b["modes"]["composite"]["final_k2"] == 2);
}
