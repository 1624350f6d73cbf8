#pragma once

#include "rebarflow/macro/scenario.hpp"
#include "rebarflow/macro/stokes_darcy_problem.hpp"

namespace rebarflow::macro {

/// Boundary data of the scenario on a P2 mesh: inlet velocity, slip walls,
/// no-slip obstacles, interface ties; pins a pressure when no outlet exists.
void apply_boundary_conditions(const Scenario& s, fem::DofMap& dofs);

/// Resolved Stokes flow on the perforated mesh.
SolveReport solve_dns(const Scenario& s);
SolveReport solve_dns(const Scenario& s, mesh::Mesh mesh);

/// Stokes flow outside the block coupled to the homogenized Darcy block.
SolveReport solve_coupled(const Scenario& s);
SolveReport solve_coupled(const Scenario& s, mesh::Mesh mesh, std::shared_ptr<const micro::RveProblem> rve = {},
                          std::optional<double> beta = std::nullopt);

/// Dispatches on s.mode.
SolveReport solve(const Scenario& s);

}  // namespace rebarflow::macro
