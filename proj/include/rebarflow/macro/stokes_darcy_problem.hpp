#pragma once

#include <optional>
#include <vector>

#include "rebarflow/fem/assembly.hpp"
#include "rebarflow/fem/dof_map.hpp"
#include "rebarflow/fem/system_matrix.hpp"
#include "rebarflow/macro/newton.hpp"

namespace rebarflow::macro {

struct EdgeLoad {
  mesh::BoundaryTag tag = mesh::BoundaryTag::Interface;
  Vec2 load = Vec2::Zero();
};

/// Terms of the (possibly coupled) weak form; unused parts stay empty.
struct ProblemTerms {
  fem::StokesTerms stokes;
  fem::DarcyLaw* darcy = nullptr;
  Vec2 darcy_body = Vec2::Zero();
  std::vector<fem::EdgeFrame> interface;  // Darcy-outward normals
  double beta = 0.0;
  std::vector<fem::EdgeFrame> outlet;
  double outlet_pressure = 0.0;
  std::optional<EdgeLoad> edge_load;
};

/// Reduced nonlinear system R(x) = T^T f(T x + g) with J = T^T K T on a
/// pattern built once.
class StokesDarcyProblem : public NonlinearSystem {
 public:
  StokesDarcyProblem(const fem::DofMap& dofs, ProblemTerms terms);

  int size() const override { return dofs_->num_reduced(); }
  void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, SparseMatrix* jacobian) override;
  long cell_solves() const override { return terms_.darcy ? terms_.darcy->solve_count() : 0; }

  /// Residual of the raw (unconstrained) equations at a raw state.
  Eigen::VectorXd raw_residual(const Eigen::VectorXd& raw_state);

  const fem::DofMap& dofs() const { return *dofs_; }
  const ProblemTerms& terms() const { return terms_; }
  ProblemTerms& terms() { return terms_; }
  const SparseMatrix& pattern() const { return pattern_; }

 private:
  void assemble(const Eigen::VectorXd& raw, fem::Accumulator& acc);

  const fem::DofMap* dofs_;
  ProblemTerms terms_;
  SparseMatrix pattern_;
};

}  // namespace rebarflow::macro
