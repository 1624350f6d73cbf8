#pragma once

#include <exception>
#include <optional>
#include <string>

#include "rebarflow/post/config.hpp"
#include "rebarflow/post/fields.hpp"

namespace rebarflow::post {

struct RunOptions {
  std::optional<int> threads;
  std::string output_directory;  // overrides the config when non-empty
  std::string dump_rve;          // directory for cell solutions, homogenized runs only
};

struct RunOutcome {
  macro::SolveReport report;
  std::string directory;
};

/// Solves the scenario and writes into the output directory:
///   scenario.ini        canonical configuration
///   mesh.txt            P2 mesh
///   fields.csv          Stokes nodes
///   darcy_fields.csv    Darcy nodes (homogenized runs)
///   report.txt          Newton history and counters, no timings
///   fields.vtk          when enabled
///   profile_<name>.csv  requested profiles
RunOutcome run_scenario(RunConfig config, const RunOptions& options = {});
RunOutcome run_scenario(const std::string& config_path, const RunOptions& options = {});

/// Cell mesh plus one field file per Darcy element at its final state.
void dump_cell_solutions(const macro::SolveReport& report, const std::string& directory);

/// Nodal fields of a cell solution.
FieldSet cell_fields(const micro::RveProblem& rve, const micro::CellSolution& solution);

/// 1 config or IO, 2 mesh, 3 solver.
int exit_code(const std::exception& e);

}  // namespace rebarflow::post
