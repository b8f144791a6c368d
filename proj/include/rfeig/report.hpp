// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "rfeig/solver.hpp"

namespace rfeig {

/// Report serialization: schema field is bumped on breaking layout changes.
nlohmann::json report_to_json(const EigenReport& rep);
EigenReport report_from_json(const nlohmann::json& j);

/// Trace CSV with header "t,p,max_residual,k2,gmres_total".
std::string trace_to_csv(const IterationTrace& trace);

/// Lossless float formatting (17 significant digits).
std::string fmt17(double x);

/// Record of one CLI invocation: subcommand, solver/analysis parameters,
/// input and output paths.  Round-trips through JSON without loss.
struct RunManifest {
  std::string command;
  SolverConfig config;
  std::vector<std::string> input_paths;
  std::vector<std::string> output_paths;
  std::uint64_t seed = 0;

  bool operator==(const RunManifest& o) const;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

}  // namespace rfeig
