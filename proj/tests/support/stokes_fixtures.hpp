#pragma once

#include <cmath>
#include <functional>
#include <memory>

#include "rebarflow/fem/assembly.hpp"
#include "rebarflow/fem/reference_element.hpp"
#include "rebarflow/macro/newton.hpp"
#include "rebarflow/macro/stokes_darcy_problem.hpp"
#include "rebarflow/mesh/generators.hpp"

namespace rebarflow::test_support {

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

struct DirichletStokes {
  std::shared_ptr<mesh::Mesh> mesh;
  std::unique_ptr<fem::DofMap> dofs;
  std::unique_ptr<macro::StokesDarcyProblem> problem;
  macro::NewtonResult result;
  Eigen::VectorXd raw;
};

/// Stokes on [0,w]x[0,h] with u = u_exact on the whole boundary and the
/// pressure pinned at vertex 0. Not solved yet.
inline DirichletStokes make_dirichlet_stokes(double w, double h, double mesh_h, const constitutive::FluidLaw& law,
                                             const VectorField& u_exact, const ScalarField& p_exact,
                                             const fem::BodyForce& body = {}) {
  DirichletStokes s;
  s.mesh = std::make_shared<mesh::Mesh>(mesh::enrich_p2(mesh::generate_rectangle_mesh(w, h, mesh_h)));
  s.dofs = std::make_unique<fem::DofMap>(*s.mesh);
  for (const auto& e : s.mesh->edges)
    for (int n : {e.a, e.b, e.mid}) s.dofs->fix_velocity(n, u_exact(s.mesh->nodes[n]));
  s.dofs->pin_pressure(0, p_exact(s.mesh->nodes[0]));
  s.dofs->finalize();
  macro::ProblemTerms terms;
  terms.stokes.law = &law;
  terms.stokes.body = body;
  s.problem = std::make_unique<macro::StokesDarcyProblem>(*s.dofs, terms);
  return s;
}

inline void solve(DirichletStokes& s) {
  macro::NewtonConfig cfg;
  cfg.tol_rel = 1e-12;
  cfg.abs_tol = 1e-13;
  s.result = macro::newton_solve(*s.problem, Eigen::VectorXd::Zero(s.dofs->num_reduced()), cfg);
  s.raw = s.dofs->expand(s.result.x);
}

inline DirichletStokes solve_dirichlet_stokes(double w, double h, double mesh_h, const constitutive::FluidLaw& law,
                                              const VectorField& u_exact, const ScalarField& p_exact,
                                              const fem::BodyForce& body = {}) {
  auto s = make_dirichlet_stokes(w, h, mesh_h, law, u_exact, p_exact, body);
  solve(s);
  return s;
}

/// Raw state interpolating the exact fields at the nodes.
inline Eigen::VectorXd interpolate(const DirichletStokes& s, const VectorField& u, const ScalarField& p) {
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(s.dofs->num_raw());
  const auto& m = *s.mesh;
  for (int n = 0; n < m.num_nodes(); ++n) {
    const Vec2 v = u(m.nodes[n]);
    raw[s.dofs->velocity(n, 0)] = v.x();
    raw[s.dofs->velocity(n, 1)] = v.y();
    if (n < m.num_vertices) raw[s.dofs->pressure(n)] = p(m.nodes[n]);
  }
  return raw;
}

struct L2Errors {
  double velocity = 0.0;
  double pressure = 0.0;
};

/// Errors with a high-order collapsed Gauss rule, independent of the assembly rules.
inline L2Errors l2_errors(const DirichletStokes& s, const VectorField& u_exact, const ScalarField& p_exact) {
  const auto rule = fem::triangle_rule_conical(8);
  L2Errors e;
  const auto& m = *s.mesh;
  for (const auto& t : m.triangles) {
    const fem::ElementGeometry geo({m.nodes[t.nodes[0]], m.nodes[t.nodes[1]], m.nodes[t.nodes[2]]});
    for (const auto& q : rule.points) {
      const Vec2 x = geo.map(q.bary);
      const auto n = fem::p2_values(q.bary);
      Vec2 uh = Vec2::Zero();
      for (int i = 0; i < 6; ++i)
        uh += n[i] * Vec2(s.raw[s.dofs->velocity(t.nodes[i], 0)], s.raw[s.dofs->velocity(t.nodes[i], 1)]);
      double ph = 0.0;
      for (int k = 0; k < 3; ++k) ph += q.bary[k] * s.raw[s.dofs->pressure(t.nodes[k])];
      const double w = q.weight * geo.det;
      e.velocity += w * (uh - u_exact(x)).squaredNorm();
      e.pressure += w * std::pow(ph - p_exact(x), 2);
    }
  }
  e.velocity = std::sqrt(e.velocity);
  e.pressure = std::sqrt(e.pressure);
  return e;
}

/// Divergence-free manufactured solution on the unit square with tau = mu D:
///   u = (pi sin^2(pi x) sin(2 pi y), -pi sin(2 pi x) sin^2(pi y)), p = cos(pi x) cos(pi y)
/// and body force rho b = -div(mu D(u)) + grad p = -(mu / 2) lap u + grad p.
struct ManufacturedStokes {
  double mu = 1.0;

  Vec2 velocity(const Vec2& x) const {
    const double pi = M_PI, sx = std::sin(pi * x.x()), sy = std::sin(pi * x.y());
    return {pi * sx * sx * std::sin(2 * pi * x.y()), -pi * std::sin(2 * pi * x.x()) * sy * sy};
  }
  double pressure(const Vec2& x) const { return std::cos(M_PI * x.x()) * std::cos(M_PI * x.y()); }
  Vec2 body(const Vec2& x) const {
    const double pi = M_PI, a = pi * x.x(), b = pi * x.y();
    // lap of sin^2(a) sin(2b) = 2 pi^2 cos(2a) sin(2b) - 4 pi^2 sin^2(a) sin(2b)
    const double lap_u = pi * (2 * pi * pi * std::cos(2 * a) * std::sin(2 * b) -
                               4 * pi * pi * std::sin(a) * std::sin(a) * std::sin(2 * b));
    const double lap_v = -pi * (-4 * pi * pi * std::sin(2 * a) * std::sin(b) * std::sin(b) +
                                2 * pi * pi * std::sin(2 * a) * std::cos(2 * b));
    const Vec2 grad_p(-pi * std::sin(a) * std::cos(b), -pi * std::cos(a) * std::sin(b));
    return -0.5 * mu * Vec2(lap_u, lap_v) + grad_p;
  }
};

}  // namespace rebarflow::test_support
