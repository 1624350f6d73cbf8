#include "rebarflow/macro/scenario.hpp"

#include <cmath>
#include <cstdio>

namespace rebarflow::macro {

std::string to_string(Mode mode) { return mode == Mode::Dns ? "dns" : "homogenized"; }

void Scenario::validate() const {
  if (!(outer.width > 0.0) || !(outer.height > 0.0)) throw ConfigError("domain dimensions must be positive");
  if (!(target_h > 0.0)) throw ConfigError("target_h must be positive");
  if (!(rve_h > 0.0)) throw ConfigError("rve_h must be positive");
  if (!std::isfinite(inlet_velocity)) throw ConfigError("inlet velocity must be finite");
  if (!std::isfinite(outlet_pressure)) throw ConfigError("outlet pressure must be finite");
  if (!beta.from_boundary_layer && !(beta.value >= 0.0)) throw ConfigError("beta must be non-negative");
  if (beta.from_boundary_layer && law.kind() != constitutive::LawKind::Newtonian)
    throw ConfigError("beta from the boundary-layer problem requires a Newtonian fluid");
  if (solver.threads < 1) throw ConfigError("threads must be at least 1");
  if (grid.rows < 1 || grid.cols < 1) throw ConfigError("obstacle grid needs positive rows and cols");
  if (!(grid.cell_size > 0.0)) throw ConfigError("cell_size must be positive");
  grid.validate(outer);
}

std::shared_ptr<const micro::RveProblem> make_rve(const Scenario& s) {
  const double l = s.grid.cell_size;
  mesh::Mesh cell = mesh::generate_rve_mesh(s.grid.radius / l, s.rve_h);
  if (l != 1.0) {
    for (auto& x : cell.nodes) x *= l;
    for (auto& p : cell.periodic) p.shift *= l;
    for (auto& d : cell.obstacles) {
      d.center *= l;
      d.radius *= l;
    }
  }
  return std::make_shared<const micro::RveProblem>(std::move(cell), s.law, s.solver.cell);
}

double resolve_beta(const Scenario& s) {
  if (!s.beta.from_boundary_layer) return s.beta.value;
  // The cell problem is posed in cell units; C_bl scales with the cell size.
  auto r = micro::solve_boundary_layer(s.grid.radius / s.grid.cell_size, s.law, s.beta.boundary_layer);
  return -s.law.base_viscosity() / (r.c_bl * s.grid.cell_size);
}

std::string SolveReport::format(bool timing) const {
  std::string out = "# mode " + to_string(mode) + "\n# iteration residual lambda cell_solves\n";
  out += format_history(history);
  char line[160];
  std::snprintf(line, sizeof line, "# nodes %d\n# unknowns %d\n# cell_solves %ld\n# beta %.17g\n",
                mesh->num_nodes(), dofs->num_reduced(), cell_solves, beta);
  out += line;
  if (timing) {
    std::snprintf(line, sizeof line, "# wall_time %.3f\n", wall_time);
    out += line;
  }
  return out;
}

}  // namespace rebarflow::macro
