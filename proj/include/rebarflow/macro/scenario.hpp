#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rebarflow/constitutive/fluid_law.hpp"
#include "rebarflow/fem/assembly.hpp"
#include "rebarflow/fem/dof_map.hpp"
#include "rebarflow/macro/newton.hpp"
#include "rebarflow/mesh/generators.hpp"
#include "rebarflow/micro/boundary_layer.hpp"
#include "rebarflow/micro/homogenized_law.hpp"
#include "rebarflow/micro/rve_problem.hpp"

namespace rebarflow::macro {

enum class Mode { Dns, Homogenized };

struct BetaSpec {
  bool from_boundary_layer = false;
  double value = 0.0;
  micro::BoundaryLayerOptions boundary_layer;
};

struct SolverSettings {
  NewtonConfig newton;
  micro::CellSolverConfig cell;
  fem::TangentProjection projection = fem::TangentProjection::Exact;
  int threads = 1;
};

struct Scenario {
  Mode mode = Mode::Dns;
  mesh::Rectangle outer{0.0, 0.0, 10.0, 4.0};
  mesh::ObstacleGrid grid;
  mesh::SideTags sides;
  double target_h = 0.1;  // macro mesh size
  double near_h = 0.0;    // DNS edge length on obstacles, <= 0 for the default
  double grading = 0.3;   // DNS growth rate away from obstacles
  double rve_h = 0.05;    // cell mesh size relative to the cell
  constitutive::FluidLaw law = constitutive::FluidLaw::newtonian(1.0);
  double inlet_velocity = 1.0;   // u_n on the inlet, flowing inwards
  double outlet_pressure = 0.0;  // traction -p_hat n on the outlet
  Vec2 body_force = Vec2::Zero();
  BetaSpec beta;
  SolverSettings solver;

  /// Throws ConfigError / MeshError on inconsistent data.
  void validate() const;
};

std::string to_string(Mode mode);

struct SolveReport {
  Mode mode = Mode::Dns;
  std::shared_ptr<const mesh::Mesh> mesh;
  std::shared_ptr<const fem::DofMap> dofs;
  Eigen::VectorXd raw;  // all fields on raw DOFs
  Eigen::VectorXd reduced;
  std::vector<NewtonIteration> history;
  double wall_time = 0.0;
  long cell_solves = 0;
  double beta = 0.0;
  std::shared_ptr<micro::HomogenizedLaw> law;  // homogenized mode only
  Vec2 body_force = Vec2::Zero();

  /// Structured text, one line per iteration. Without timing the text is
  /// reproducible run to run.
  std::string format(bool timing = true) const;
};

/// Unit-cell problem matching the scenario's grid (scaled to cell_size).
std::shared_ptr<const micro::RveProblem> make_rve(const Scenario& s);

/// Friction coefficient of the scenario: explicit or from the boundary-layer problem.
double resolve_beta(const Scenario& s);

}  // namespace rebarflow::macro
