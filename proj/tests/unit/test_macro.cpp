#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "rebarflow/macro/solvers.hpp"
#include "rebarflow/fem/quadrature.hpp"
#include "rebarflow/fem/reference_element.hpp"
#include "stokes_fixtures.hpp"

using namespace rebarflow;
using namespace rebarflow::macro;
using constitutive::FluidLaw;

namespace {

// r(x) = atan(x): full Newton steps overshoot for |x| > 1.39.
class Arctangent : public NonlinearSystem {
 public:
  int size() const override { return 1; }
  void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, SparseMatrix* j) override {
    r.resize(1);
    r[0] = std::atan(x[0]);
    if (j) {
      j->resize(1, 1);
      j->coeffRef(0, 0) = wrong_sign ? -1.0 / (1 + x[0] * x[0]) : 1.0 / (1 + x[0] * x[0]);
      j->makeCompressed();
    }
  }
  bool wrong_sign = false;
};

Scenario unidirectional(double h) {
  Scenario s;
  s.grid.origin = Vec2(3, 0);
  s.beta.value = 1.0;
  s.target_h = h;
  return s;
}

Vec2 stokes_u(const SolveReport& r, int n) { return {r.raw[r.dofs->velocity(n, 0)], r.raw[r.dofs->velocity(n, 1)]}; }
Vec2 darcy_u(const SolveReport& r, int n) {
  return {r.raw[r.dofs->darcy_velocity(n, 0)], r.raw[r.dofs->darcy_velocity(n, 1)]};
}

Vec2 velocity_on_element(const SolveReport& r, int t, const Eigen::Vector3d& l) {
  const auto& tri = r.mesh->triangles[t];
  const auto n = fem::p2_values(l);
  const bool darcy = tri.region == mesh::Region::Darcy;
  Vec2 u = Vec2::Zero();
  for (int i = 0; i < 6; ++i) u += n[i] * (darcy ? darcy_u(r, tri.nodes[i]) : stokes_u(r, tri.nodes[i]));
  return u;
}

// Discrete flux through the band of elements cut by x = c: -int grad(psi) . u with
// psi the P1 function equal to 1 at vertices left of c and 0 elsewhere. It
// equals the inflow exactly whenever the weak continuity equations hold.
double section_flux(const SolveReport& r, double c) {
  const auto& m = *r.mesh;
  const auto& rule = fem::triangle_rule_7();
  double flux = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    const fem::ElementGeometry geo({m.nodes[tri.nodes[0]], m.nodes[tri.nodes[1]], m.nodes[tri.nodes[2]]});
    Vec2 grad_psi = Vec2::Zero();
    const auto g = geo.physical<3>(fem::p1_reference_gradients());
    for (int k = 0; k < 3; ++k)
      if (m.nodes[tri.nodes[k]].x() < c) grad_psi += g.row(k).transpose();
    if (grad_psi.squaredNorm() == 0.0) continue;
    for (const auto& q : rule.points) flux -= q.weight * geo.det * grad_psi.dot(velocity_on_element(r, t, q.bary));
  }
  return flux;
}

// Net outward flux over all outer boundary edges (3-point Gauss is exact for quadratic traces).
double boundary_flux(const SolveReport& r) {
  const auto& m = *r.mesh;
  const auto line = fem::gauss_legendre(3);
  double net = 0.0;
  for (auto tag : {mesh::BoundaryTag::Inlet, mesh::BoundaryTag::Outlet, mesh::BoundaryTag::SlipWall,
                   mesh::BoundaryTag::Obstacle}) {
    for (const auto& f : fem::edge_frames(m, tag)) {
      const auto& e = m.edges[f.edge];
      const bool darcy = m.triangles[f.triangle].region == mesh::Region::Darcy;
      const std::array<int, 3> nodes{e.a, e.mid, e.b};
      for (std::size_t q = 0; q < line.t.size(); ++q) {
        const auto w = fem::p2_edge_values(line.t[q]);
        Vec2 u = Vec2::Zero();
        for (int i = 0; i < 3; ++i) u += w[i] * (darcy ? darcy_u(r, nodes[i]) : stokes_u(r, nodes[i]));
        net += line.w[q] * f.length * u.dot(f.normal);
      }
    }
  }
  return net;
}

}  // namespace

TEST(Newton, BacktrackingRescuesOvershoot) {
  Arctangent sys;
  NewtonConfig cfg;
  cfg.tol_rel = 1e-14;
  cfg.abs_tol = 1e-14;
  const auto res = newton_solve(sys, Eigen::VectorXd::Constant(1, 3.0), cfg);
  EXPECT_LT(std::abs(res.x[0]), 1e-12);
  bool damped = false;
  for (const auto& it : res.history) damped |= it.index > 0 && it.step < 1.0;
  EXPECT_TRUE(damped);
  for (std::size_t k = 1; k < res.history.size(); ++k) {
    EXPECT_LT(res.history[k].residual, res.history[k - 1].residual);
    EXPECT_LE(res.history[k].residual, (1 - cfg.sigma * res.history[k].step) * res.history[k - 1].residual);
  }
}

TEST(Newton, LineSearchFailureReported) {
  Arctangent sys;
  sys.wrong_sign = true;
  try {
    newton_solve(sys, Eigen::VectorXd::Constant(1, 0.5), NewtonConfig{});
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("line search failed"), std::string::npos);
  }
}

TEST(Newton, IterationLimitReported) {
  Arctangent sys;
  NewtonConfig cfg;
  cfg.max_iterations = 2;
  cfg.abs_tol = 1e-300;
  cfg.tol_rel = 1e-300;
  try {
    newton_solve(sys, Eigen::VectorXd::Constant(1, 3.0), cfg);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("did not converge"), std::string::npos);
  }
}

TEST(Newton, HistoryFormat) {
  std::vector<NewtonIteration> h{{0, 1.0, 0.0, 0, 0.0}, {1, 0.5, 0.25, 12, 0.0}};
  EXPECT_EQ(format_history(h), "0 1.000000e+00 0.000000e+00 0\n1 5.000000e-01 2.500000e-01 12\n");
}

// A yield-dominated law; with the benchmark parameters full steps are accepted on this patch.
TEST(Newton, ScaledInitialGuessEngagesLineSearch) {
  const auto law = FluidLaw::bingham(1, 100, 50);
  auto s = test_support::make_dirichlet_stokes(1, 1, 0.25, law, [](const Vec2& x) { return Vec2(x.y(), 0.0); },
                                          [](const Vec2&) { return 0.0; });
  test_support::solve(s);
  NewtonConfig cfg;
  const auto res = newton_solve(*s.problem, 1e3 * s.result.x, cfg);
  bool damped = false;
  for (const auto& it : res.history) damped |= it.index > 0 && it.step < 1.0;
  EXPECT_TRUE(damped);
  EXPECT_LT((res.x - s.result.x).norm(), 1e-6 * s.result.x.norm());
}

TEST(Newton, BinghamCouetteQuadraticTail) {
  const auto law = FluidLaw::bingham(20, 20, 15);
  auto s = test_support::make_dirichlet_stokes(1, 1, 0.2, law, [](const Vec2& x) { return Vec2(x.y() * x.y(), 0.0); },
                                          [](const Vec2&) { return 0.0; });
  test_support::solve(s);
  const auto& h = s.result.history;
  ASSERT_GE(h.size(), 4u);
  for (std::size_t k = 1; k < h.size(); ++k) EXPECT_LT(h[k].residual, h[k - 1].residual);
  const double r0 = h.front().residual;
  for (std::size_t k = h.size() - 2; k < h.size(); ++k) {
    const double cur = h[k].residual / r0, prev = h[k - 1].residual / r0;
    EXPECT_LT(cur / (prev * prev), 100.0) << "step " << k;
  }
}

TEST(DnsSolve, EmptyChannelPlugFlow) {
  Scenario s;
  const auto r = solve_dns(s, mesh::generate_rectangle_mesh(10, 4, 0.5));
  EXPECT_EQ(r.history.size(), 2u);
  for (int n = 0; n < r.mesh->num_nodes(); ++n) EXPECT_LT((stokes_u(r, n) - Vec2(1, 0)).norm(), 1e-10);
  for (int v = 0; v < r.mesh->num_vertices; ++v) EXPECT_NEAR(r.raw[r.dofs->pressure(v)], 0.0, 1e-10);
}

TEST(DnsSolve, UnidirectionalBenchmarkConservesMass) {
  const auto r = solve_dns(unidirectional(0.2));
  EXPECT_EQ(r.history.size(), 2u);
  for (double c : {0.5, 3.2, 3.5, 5.0, 6.75, 9.5}) EXPECT_NEAR(section_flux(r, c), 4.0, 1e-6) << "x = " << c;
  EXPECT_LT(std::abs(boundary_flux(r)), 1e-8 * 4.0);
  for (const auto& e : r.mesh->edges) {
    if (e.tag != mesh::BoundaryTag::Obstacle) continue;
    for (int n : {e.a, e.mid, e.b}) EXPECT_EQ(stokes_u(r, n), Vec2(0, 0));
  }
}

TEST(DnsSolve, WeakIncompressibility) {
  const auto r = solve_dns(unidirectional(0.25));
  // int psi_i div(u) per vertex with a degree-5 rule (div u is linear, psi_i linear)
  const auto& m = *r.mesh;
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.num_vertices);
  const auto& rule = fem::triangle_rule_7();
  for (const auto& t : m.triangles) {
    const fem::ElementGeometry geo({m.nodes[t.nodes[0]], m.nodes[t.nodes[1]], m.nodes[t.nodes[2]]});
    for (const auto& q : rule.points) {
      const auto g = geo.physical<6>(fem::p2_reference_gradients(q.bary));
      double div = 0.0;
      for (int i = 0; i < 6; ++i) div += g(i, 0) * stokes_u(r, t.nodes[i]).x() + g(i, 1) * stokes_u(r, t.nodes[i]).y();
      for (int k = 0; k < 3; ++k) rows[t.nodes[k]] += q.weight * geo.det * q.bary[k] * div;
    }
  }
  EXPECT_LT(rows.lpNorm<Eigen::Infinity>(), 1e-9);
}

TEST(DnsSolve, ResidualReassemblyIsBitwise) {
  const Scenario s = unidirectional(0.3);
  const auto r = solve_dns(s);
  fem::DofMap dofs(*r.mesh);
  apply_boundary_conditions(s, dofs);
  dofs.finalize();
  ProblemTerms terms;
  terms.stokes.law = &s.law;
  terms.outlet = fem::edge_frames(*r.mesh, mesh::BoundaryTag::Outlet);
  terms.outlet_pressure = s.outlet_pressure;
  StokesDarcyProblem problem(dofs, terms);
  Eigen::VectorXd res;
  problem.evaluate(r.reduced, res, nullptr);
  EXPECT_EQ(res.norm(), r.history.back().residual);
}

TEST(CoupledSolve, UnidirectionalSeepageIsUniform) {
  Scenario s = unidirectional(1.0);
  s.mode = Mode::Homogenized;
  const auto r = solve_coupled(s);
  EXPECT_EQ(r.history.size(), 2u);
  int darcy_nodes = 0;
  for (int n = 0; n < r.mesh->num_nodes(); ++n) {
    if (!r.dofs->has_darcy(n)) continue;
    ++darcy_nodes;
    EXPECT_LT((darcy_u(r, n) - Vec2(1, 0)).norm(), 1e-6);
  }
  EXPECT_GT(darcy_nodes, 0);
  EXPECT_LT(std::abs(boundary_flux(r)), 1e-8 * 4.0);
}

TEST(CoupledSolve, InterfaceTraceConditions) {
  Scenario s;
  s.outer = {0, 0, 12, 8};
  s.grid.origin = Vec2(4, 2);
  s.grid.radius = 0.125;
  s.mode = Mode::Homogenized;
  s.target_h = 1.0;
  s.rve_h = 0.1;
  s.beta.value = 3.0;
  const auto r = solve_coupled(s);
  const auto& normals = r.dofs->interface_normals();
  int tied = 0;
  double friction_work = 0.0;
  for (int n = 0; n < r.mesh->num_nodes(); ++n) {
    if (!(r.dofs->has_stokes(n) && r.dofs->has_darcy(n))) continue;
    ++tied;
    const Vec2 nn = normals[n];
    const Vec2 t(-nn.y(), nn.x());
    EXPECT_NEAR(darcy_u(r, n).dot(nn), stokes_u(r, n).dot(nn), 1e-12);
    EXPECT_NEAR(darcy_u(r, n).dot(t), 0.0, 1e-12);
    friction_work += r.beta * std::pow(stokes_u(r, n).dot(t), 2);
  }
  EXPECT_GT(tied, 0);
  EXPECT_GE(friction_work, 0.0);
  EXPECT_LT(std::abs(boundary_flux(r)), 1e-8 * 8.0);
}

TEST(CoupledSolve, NewtonianLawSolvesInOneIteration) {
  Scenario s;
  s.outer = {0, 0, 12, 8};
  s.grid.origin = Vec2(4, 2);
  s.grid.radius = 0.125;
  s.law = FluidLaw::newtonian(20.0);
  s.mode = Mode::Homogenized;
  s.target_h = 1.0;
  s.rve_h = 0.1;
  const auto r = solve(s);
  EXPECT_EQ(r.history.size(), 2u);
  EXPECT_EQ(r.cell_solves, 2);
}

TEST(Scenario, ValidationErrors) {
  Scenario s;
  s.grid.origin = Vec2(3, 0);
  EXPECT_NO_THROW(s.validate());
  Scenario neg = s;
  neg.beta.value = -1.0;
  EXPECT_THROW(neg.validate(), ConfigError);
  Scenario big = s;
  big.grid.radius = 0.6;
  EXPECT_THROW(big.validate(), MeshError);
  Scenario outside = s;
  outside.grid.origin = Vec2(8, 0);
  EXPECT_THROW(outside.validate(), MeshError);
  Scenario inf = s;
  inf.inlet_velocity = std::numeric_limits<double>::infinity();
  EXPECT_THROW(inf.validate(), ConfigError);
}

TEST(Scenario, FrictionFromBoundaryLayerScalesWithCell) {
  Scenario s;
  s.grid.origin = Vec2(3, 0);
  s.beta.from_boundary_layer = true;
  const double b1 = resolve_beta(s);
  s.grid.cell_size = 0.5;
  s.grid.radius = 0.125;
  s.grid.rows = s.grid.cols = 8;
  const double b2 = resolve_beta(s);
  EXPECT_GT(b1, 0.0);
  EXPECT_NEAR(b2, 2.0 * b1, 1e-12 * b1);
}
