#include "rebarflow/macro/solvers.hpp"

#include <chrono>

namespace rebarflow::macro {

using mesh::BoundaryTag;
using mesh::Region;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NewtonConfig newton_config(const Scenario& s) { return s.solver.newton; }

}  // namespace

void apply_boundary_conditions(const Scenario& s, fem::DofMap& dofs) {
  const auto& m = dofs.mesh();
  bool has_outlet = false;
  for (BoundaryTag tag : {BoundaryTag::Inlet, BoundaryTag::SlipWall, BoundaryTag::Obstacle, BoundaryTag::Outlet}) {
    for (const auto& f : fem::edge_frames(m, tag)) {
      const auto& e = m.edges[f.edge];
      for (int v : {e.a, e.mid, e.b}) {
        switch (tag) {
          case BoundaryTag::Inlet:
            if (dofs.has_stokes(v)) dofs.fix_velocity(v, -s.inlet_velocity * f.normal);
            if (dofs.has_darcy(v)) dofs.prescribe_darcy_velocity(v, f.normal, -s.inlet_velocity);
            break;
          case BoundaryTag::SlipWall:
            if (dofs.has_stokes(v)) dofs.prescribe_velocity(v, f.normal, 0.0);
            if (dofs.has_darcy(v)) dofs.prescribe_darcy_velocity(v, f.normal, 0.0);
            break;
          case BoundaryTag::Obstacle:
            if (dofs.has_stokes(v)) dofs.fix_velocity(v, Vec2::Zero());
            break;
          default:
            has_outlet = true;
            break;
        }
      }
    }
  }
  const auto frames = fem::edge_frames(m, BoundaryTag::Interface, Region::Darcy);
  const auto normals = fem::node_normals(m, frames);
  for (int v = 0; v < m.num_nodes(); ++v)
    if (normals[v].squaredNorm() > 0.0) dofs.couple_interface(v, normals[v]);
  for (const auto& pp : m.periodic) dofs.make_periodic(pp.master, pp.slave);
  if (!has_outlet) {
    for (int v = 0; v < m.num_vertices; ++v) {
      if (dofs.pressure(v) >= 0) {
        dofs.pin_pressure(v, 0.0);
        break;
      }
    }
  }
}

SolveReport solve_dns(const Scenario& s) {
  s.validate();
  mesh::MeshSizing sizing{s.target_h, s.near_h, s.grading};
  return solve_dns(s, mesh::generate_perforated_mesh(s.outer, s.grid, sizing, s.sides));
}

SolveReport solve_dns(const Scenario& s, mesh::Mesh input) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.mode = Mode::Dns;
  rep.body_force = s.body_force;
  auto m = std::make_shared<const mesh::Mesh>(input.is_p2() ? std::move(input) : mesh::enrich_p2(input));
  rep.mesh = m;
  auto dofs = std::make_shared<fem::DofMap>(*m);
  apply_boundary_conditions(s, *dofs);
  dofs->finalize();
  rep.dofs = dofs;

  ProblemTerms terms;
  terms.stokes.law = &s.law;
  terms.stokes.projection = s.solver.projection;
  if (s.body_force.squaredNorm() > 0.0) {
    const Vec2 b = s.body_force;
    terms.stokes.body = [b](const Vec2&) { return b; };
  }
  terms.outlet = fem::edge_frames(*m, BoundaryTag::Outlet);
  terms.outlet_pressure = s.outlet_pressure;
  StokesDarcyProblem problem(*dofs, std::move(terms));
  auto res = newton_solve(problem, Eigen::VectorXd::Zero(problem.size()), newton_config(s));
  rep.reduced = std::move(res.x);
  rep.raw = dofs->expand(rep.reduced);
  rep.history = std::move(res.history);
  rep.wall_time = seconds_since(t0);
  return rep;
}

SolveReport solve_coupled(const Scenario& s) {
  s.validate();
  return solve_coupled(s, mesh::generate_homogenized_mesh(s.outer, s.grid, s.target_h, s.sides));
}

SolveReport solve_coupled(const Scenario& s, mesh::Mesh input, std::shared_ptr<const micro::RveProblem> rve,
                          std::optional<double> beta) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.mode = Mode::Homogenized;
  rep.body_force = s.body_force;
  auto m = std::make_shared<const mesh::Mesh>(input.is_p2() ? std::move(input) : mesh::enrich_p2(input));
  rep.mesh = m;
  auto dofs = std::make_shared<fem::DofMap>(*m);
  apply_boundary_conditions(s, *dofs);
  dofs->finalize();
  rep.dofs = dofs;

  if (!rve) rve = make_rve(s);
  rep.law = std::make_shared<micro::HomogenizedLaw>(rve, s.solver.threads, s.grid.rotation_angle);
  rep.beta = beta ? *beta : resolve_beta(s);

  ProblemTerms terms;
  terms.stokes.law = &s.law;
  terms.stokes.projection = s.solver.projection;
  if (s.body_force.squaredNorm() > 0.0) {
    const Vec2 b = s.body_force;
    terms.stokes.body = [b](const Vec2&) { return b; };
  }
  terms.darcy = rep.law.get();
  terms.darcy_body = s.body_force;
  terms.interface = fem::edge_frames(*m, BoundaryTag::Interface, Region::Darcy);
  terms.beta = rep.beta;
  terms.outlet = fem::edge_frames(*m, BoundaryTag::Outlet);
  terms.outlet_pressure = s.outlet_pressure;
  StokesDarcyProblem problem(*dofs, std::move(terms));
  auto res = newton_solve(problem, Eigen::VectorXd::Zero(problem.size()), newton_config(s));
  rep.reduced = std::move(res.x);
  rep.raw = dofs->expand(rep.reduced);
  rep.history = std::move(res.history);
  rep.cell_solves = rep.law->solve_count();
  rep.wall_time = seconds_since(t0);
  return rep;
}

SolveReport solve(const Scenario& s) { return s.mode == Mode::Dns ? solve_dns(s) : solve_coupled(s); }

}  // namespace rebarflow::macro
