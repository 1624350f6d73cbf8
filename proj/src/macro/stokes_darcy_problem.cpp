#include "rebarflow/macro/stokes_darcy_problem.hpp"

namespace rebarflow::macro {

StokesDarcyProblem::StokesDarcyProblem(const fem::DofMap& dofs, ProblemTerms terms)
    : dofs_(&dofs), terms_(std::move(terms)) {
  fem::SparsityBuilder builder(dofs);
  fem::add_pattern(builder, dofs, terms_.interface);
  pattern_ = builder.build();
}

void StokesDarcyProblem::assemble(const Eigen::VectorXd& raw, fem::Accumulator& acc) {
  fem::assemble_stokes(*dofs_, terms_.stokes, raw, acc);
  if (terms_.darcy) fem::assemble_darcy(*dofs_, *terms_.darcy, terms_.darcy_body, raw, acc);
  if (!terms_.interface.empty()) fem::assemble_interface(*dofs_, terms_.interface, terms_.beta, raw, acc);
  if (!terms_.outlet.empty()) fem::assemble_normal_traction(*dofs_, terms_.outlet, terms_.outlet_pressure, acc);
  if (terms_.edge_load) fem::assemble_edge_load(*dofs_, terms_.edge_load->tag, terms_.edge_load->load, acc);
}

void StokesDarcyProblem::evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, SparseMatrix* jacobian) {
  const Eigen::VectorXd raw = dofs_->expand(x);
  r.setZero(size());
  if (jacobian) {
    if (jacobian->rows() != pattern_.rows() || jacobian->nonZeros() != pattern_.nonZeros()) *jacobian = pattern_;
    fem::zero_values(*jacobian);
  }
  fem::Accumulator acc(*dofs_, &r, jacobian);
  assemble(raw, acc);
}

Eigen::VectorXd StokesDarcyProblem::raw_residual(const Eigen::VectorXd& raw_state) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(dofs_->num_raw());
  auto acc = fem::Accumulator::raw(*dofs_, &r);
  assemble(raw_state, acc);
  return r;
}

}  // namespace rebarflow::macro
