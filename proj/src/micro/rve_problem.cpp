#include "rebarflow/micro/rve_problem.hpp"

#include <cmath>

#include "rebarflow/fem/reference_element.hpp"
#include "rebarflow/macro/newton.hpp"
#include "rebarflow/mesh/generators.hpp"

namespace rebarflow::micro {

using constitutive::LawKind;

class RveProblem::CellSystem : public macro::NonlinearSystem {
 public:
  CellSystem(const RveProblem& p, const Vec2& drive) : p_(p), drive_(drive) {}
  int size() const override { return p_.dofs_->num_reduced(); }
  void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, fem::SparseMatrix* jac) override {
    const Eigen::VectorXd raw = p_.dofs_->expand(x);
    r.setZero(size());
    if (jac) {
      if (jac->nonZeros() != p_.pattern_.nonZeros()) *jac = p_.pattern_;
      fem::zero_values(*jac);
    }
    fem::Accumulator acc(*p_.dofs_, &r, jac);
    fem::StokesTerms terms;
    terms.law = &p_.law_;
    terms.projection = p_.config_.projection;
    fem::assemble_stokes(*p_.dofs_, terms, raw, acc);
    r -= p_.load_ * drive_;
  }

 private:
  const RveProblem& p_;
  Vec2 drive_;
};

RveProblem::RveProblem(double xi, const constitutive::FluidLaw& law, double target_h, CellSolverConfig config)
    : xi_(xi), law_(law), config_(config), mesh_(mesh::generate_rve_mesh(xi, target_h)) {
  setup();
}

RveProblem::RveProblem(mesh::Mesh cell_mesh, const constitutive::FluidLaw& law, CellSolverConfig config)
    : law_(law), config_(config), mesh_(std::move(cell_mesh)) {
  if (!mesh_.obstacles.empty()) xi_ = mesh_.obstacles.front().radius;
  setup();
}

RveProblem::~RveProblem() = default;

void RveProblem::setup() {
  if (!mesh_.is_p2()) mesh_ = mesh::enrich_p2(mesh_);
  Vec2 lo = mesh_.nodes.front(), hi = lo;
  for (const auto& x : mesh_.nodes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  cell_area_ = (hi - lo).prod();
  fluid_area_ = mesh_.area();
  if (mesh_.periodic.empty()) throw MeshError("cell mesh has no periodic pairs");

  dofs_ = std::make_unique<fem::DofMap>(mesh_);
  for (const auto& e : mesh_.edges) {
    if (e.tag != mesh::BoundaryTag::Obstacle) continue;
    for (int v : {e.a, e.mid, e.b}) dofs_->fix_velocity(v, Vec2::Zero());
  }
  for (const auto& pp : mesh_.periodic) dofs_->make_periodic(pp.master, pp.slave);
  dofs_->pin_pressure(mesh_.triangles.front().nodes[0], 0.0);
  dofs_->finalize();

  fem::SparsityBuilder builder(*dofs_);
  fem::add_pattern(builder, *dofs_, {});
  pattern_ = builder.build();

  raw_load_ = Eigen::Matrix<double, Eigen::Dynamic, 2>::Zero(dofs_->num_raw(), 2);
  for (const auto& t : mesh_.triangles) {
    const double area = std::abs(fem::ElementGeometry({mesh_.nodes[t.nodes[0]], mesh_.nodes[t.nodes[1]],
                                                       mesh_.nodes[t.nodes[2]]}).area());
    // P2 vertex functions integrate to zero, edge functions to area / 3.
    for (int i = 3; i < 6; ++i)
      for (int k = 0; k < 2; ++k) raw_load_(dofs_->velocity(t.nodes[i], k), k) += area / 3.0;
  }
  load_.resize(dofs_->num_reduced(), 2);
  for (int k = 0; k < 2; ++k) load_.col(k) = dofs_->restrict(raw_load_.col(k));
  flux_ = load_.transpose() / cell_area_;
  locator_ = std::make_unique<mesh::PointLocator>(mesh_);
}

double RveProblem::porosity() const { return fluid_area_ / cell_area_; }

const linsolve::SparseLU& RveProblem::newtonian_factor() const {
  std::call_once(newtonian_once_, [this] {
    CellSystem sys(*this, Vec2::Zero());
    Eigen::VectorXd r;
    fem::SparseMatrix jac;
    sys.evaluate(Eigen::VectorXd::Zero(dofs_->num_reduced()), r, &jac);
    auto lu = std::make_unique<linsolve::SparseLU>();
    lu->factorize(jac);
    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd chi = lu->solve(load_.col(k));
      newtonian_k_.col(k) = reduced_flux(chi);
    }
    newtonian_jacobian_ = std::move(jac);
    newtonian_lu_ = std::move(lu);
  });
  return *newtonian_lu_;
}

Vec2 RveProblem::reduced_flux(const Eigen::VectorXd& direction) const { return flux_ * direction; }

void RveProblem::finish(CellSolution& s) const {
  s.raw = dofs_->expand(s.reduced);
  double integral = 0.0;
  for (const auto& t : mesh_.triangles) {
    const double area = std::abs(fem::ElementGeometry({mesh_.nodes[t.nodes[0]], mesh_.nodes[t.nodes[1]],
                                                       mesh_.nodes[t.nodes[2]]}).area());
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) sum += s.raw[dofs_->pressure(t.nodes[k])];
    integral += area * sum / 3.0;
  }
  const double mean = integral / fluid_area_;
  for (int v = 0; v < mesh_.num_vertices; ++v)
    if (dofs_->pressure(v) >= 0) s.raw[dofs_->pressure(v)] -= mean;
}

CellSolution RveProblem::solve_cell(const Vec2& gradient, const Vec2& body, const CellSolution* warm) const {
  CellSolution s;
  s.gradient = gradient;
  s.body = body;
  const Vec2 drive = body - gradient;
  const Eigen::VectorXd load = load_ * drive;
  if (law_.kind() == LawKind::Newtonian) {
    const auto& lu = newtonian_factor();
    s.reduced = lu.solve(load);
    s.iterations = 1;
  } else {
    CellSystem sys(*this, drive);
    macro::NewtonConfig cfg;
    cfg.tol_rel = config_.tol_rel;
    cfg.abs_tol = config_.abs_tol;
    cfg.max_iterations = config_.max_iterations;
    cfg.reference_norm = load.norm();
    Eigen::VectorXd x0 = warm && warm->reduced.size() == load.size() ? warm->reduced
                                                                      : Eigen::VectorXd::Zero(load.size());
    auto res = macro::newton_solve(sys, std::move(x0), cfg);
    s.reduced = std::move(res.x);
    s.iterations = res.iterations;
  }
  finish(s);
  return s;
}

Vec2 RveProblem::seepage_flux(const CellSolution& s) const { return reduced_flux(s.reduced); }

Mat2 RveProblem::tangent_permeability(const CellSolution& s) const {
  if (law_.kind() == LawKind::Newtonian) {
    newtonian_factor();
    return newtonian_k_;
  }
  CellSystem sys(*this, s.body - s.gradient);
  Eigen::VectorXd r;
  fem::SparseMatrix jac;
  sys.evaluate(s.reduced, r, &jac);
  linsolve::SparseLU lu;
  lu.factorize(jac);
  Mat2 k;
  for (int c = 0; c < 2; ++c) k.col(c) = reduced_flux(lu.solve(load_.col(c)));
  return k;
}

Eigen::VectorXd RveProblem::raw_residual(const CellSolution& s) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dofs_->num_raw());
  auto acc = fem::Accumulator::raw(*dofs_, &r);
  fem::StokesTerms terms;
  terms.law = &law_;
  fem::assemble_stokes(*dofs_, terms, s.raw, acc);
  r -= raw_load_ * (s.body - s.gradient);
  return r;
}

namespace {

Vec2 wrap(const mesh::Mesh& m, const Vec2& y) {
  Vec2 lo = m.nodes.front(), hi = lo;
  for (int i = 0; i < m.num_vertices; ++i) {
    lo = lo.cwiseMin(m.nodes[i]);
    hi = hi.cwiseMax(m.nodes[i]);
  }
  const Vec2 size = hi - lo;
  Vec2 out;
  for (int k = 0; k < 2; ++k) out[k] = lo[k] + size[k] * (((y[k] - lo[k]) / size[k]) - std::floor((y[k] - lo[k]) / size[k]));
  return out;
}

}  // namespace

std::optional<Vec2> RveProblem::velocity_at(const CellSolution& s, const Vec2& y) const {
  const auto loc = locator_->locate(wrap(mesh_, y));
  if (!loc) return std::nullopt;
  const auto& t = mesh_.triangles[loc->triangle];
  const auto n = fem::p2_values(loc->bary);
  Vec2 u = Vec2::Zero();
  for (int i = 0; i < 6; ++i) u += n[i] * Vec2(s.raw[dofs_->velocity(t.nodes[i], 0)], s.raw[dofs_->velocity(t.nodes[i], 1)]);
  return u;
}

std::optional<double> RveProblem::pressure_at(const CellSolution& s, const Vec2& y) const {
  const auto loc = locator_->locate(wrap(mesh_, y));
  if (!loc) return std::nullopt;
  const auto& t = mesh_.triangles[loc->triangle];
  double p = 0.0;
  for (int k = 0; k < 3; ++k) p += loc->bary[k] * s.raw[dofs_->pressure(t.nodes[k])];
  return p;
}

}  // namespace rebarflow::micro
