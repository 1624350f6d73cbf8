#include "rebarflow/micro/boundary_layer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rebarflow/fem/assembly.hpp"
#include "rebarflow/fem/dof_map.hpp"
#include "rebarflow/macro/newton.hpp"
#include "rebarflow/macro/stokes_darcy_problem.hpp"
#include "rebarflow/mesh/generators.hpp"

namespace rebarflow::micro {

using mesh::BoundaryTag;

BoundaryLayerResult solve_boundary_layer(double xi, const constitutive::FluidLaw& law,
                                         const BoundaryLayerOptions& options) {
  if (options.free_cells < 1) throw ConfigError("boundary layer needs at least one free cell");
  return solve_boundary_layer(mesh::generate_boundary_layer_mesh(xi, options.free_cells, options.target_h), law,
                              options);
}

BoundaryLayerResult solve_boundary_layer(const mesh::Mesh& stack, const constitutive::FluidLaw& law,
                                         const BoundaryLayerOptions& options) {
  if (law.kind() != constitutive::LawKind::Newtonian)
    throw ConfigError("boundary-layer constant is only defined for Newtonian fluids");
  const mesh::Mesh m = stack.is_p2() ? stack : mesh::enrich_p2(stack);

  fem::DofMap dofs(m);
  bool top_pins_pressure = options.top == BlTopCondition::Slip;
  double y_top = -1e300, y_gamma = 0.0;
  for (const auto& e : m.edges) {
    const int nodes[3] = {e.a, e.mid, e.b};
    switch (e.tag) {
      case BoundaryTag::Obstacle:
      case BoundaryTag::BlBottom:
        for (int v : nodes) dofs.fix_velocity(v, Vec2::Zero());
        break;
      case BoundaryTag::BlTop:
        y_top = std::max(y_top, m.nodes[e.a].y());
        for (int v : nodes) {
          if (options.top == BlTopCondition::Slip) dofs.prescribe_velocity(v, Vec2::UnitY(), 0.0);
          else dofs.prescribe_velocity(v, Vec2::UnitX(), 0.0);
        }
        break;
      case BoundaryTag::Interface:
        y_gamma = m.nodes[e.a].y();
        break;
      default:
        break;
    }
  }
  for (const auto& pp : m.periodic) dofs.make_periodic(pp.master, pp.slave);
  // Free normal velocity on top fixes the pressure level; otherwise pin one vertex.
  if (top_pins_pressure) dofs.pin_pressure(m.triangles.front().nodes[0], 0.0);
  dofs.finalize();

  const auto unit = constitutive::FluidLaw::newtonian(1.0);
  macro::ProblemTerms terms;
  terms.stokes.law = &unit;
  terms.stokes.form = fem::ViscousForm::Laplacian;
  // Jump (upper minus lower) of the shear traction equals e1, which enters the
  // weak form as a load -e1 on the interface.
  terms.edge_load = macro::EdgeLoad{BoundaryTag::Interface, -Vec2::UnitX()};
  macro::StokesDarcyProblem problem(dofs, std::move(terms));
  macro::NewtonConfig cfg;
  cfg.tol_rel = 1e-12;
  auto res = macro::newton_solve(problem, Eigen::VectorXd::Zero(problem.size()), cfg);
  const Eigen::VectorXd raw = dofs.expand(res.x);

  double len_total = 0.0, c_bl = 0.0;
  std::map<double, double> trace;
  for (const auto& e : m.edges) {
    if (e.tag != BoundaryTag::Interface) continue;
    const double len = (m.nodes[e.b] - m.nodes[e.a]).norm();
    len_total += len;
    const double ua = raw[dofs.velocity(e.a, 0)], um = raw[dofs.velocity(e.mid, 0)], ub = raw[dofs.velocity(e.b, 0)];
    c_bl += len * (ua + 4.0 * um + ub) / 6.0;
    for (int v : {e.a, e.mid, e.b}) trace[m.nodes[v].x()] = raw[dofs.velocity(v, 0)];
  }
  if (len_total <= 0.0) throw MeshError("boundary-layer mesh has no interface edges");

  if (!(c_bl < 0.0)) throw SolverError("boundary-layer constant is not negative: " + std::to_string(c_bl));
  BoundaryLayerResult out;
  out.c_bl = c_bl;
  out.mu = law.base_viscosity();
  out.beta = -out.mu / c_bl;
  out.free_cells = static_cast<int>(std::lround(y_top - y_gamma));
  out.height = y_top - y_gamma;
  out.trace.assign(trace.begin(), trace.end());
  return out;
}

}  // namespace rebarflow::micro
