#pragma once

#include <Eigen/Core>
#include <memory>
#include <mutex>
#include <optional>

#include "rebarflow/constitutive/fluid_law.hpp"
#include "rebarflow/fem/assembly.hpp"
#include "rebarflow/fem/dof_map.hpp"
#include "rebarflow/linsolve/sparse_lu.hpp"
#include "rebarflow/mesh/mesh.hpp"
#include "rebarflow/mesh/point_locator.hpp"

namespace rebarflow::micro {

struct CellSolverConfig {
  double tol_rel = 1e-10;
  double abs_tol = 1e-14;
  int max_iterations = 50;
  fem::TangentProjection projection = fem::TangentProjection::Exact;
};

struct CellSolution {
  Vec2 gradient = Vec2::Zero();
  Vec2 body = Vec2::Zero();
  Eigen::VectorXd reduced;  // solver unknowns, used for warm starts
  Eigen::VectorXd raw;      // u and p on the cell, pressure shifted to zero mean
  int iterations = 0;
};

/// Periodic unit-cell Stokes problem driven by (rho_b - grad pbar):
///   int D(dw):tau - int div(dw) p - int dq div(u) ... = int dw . (rho_b - g)
/// with u = 0 on the obstacle and all fields periodic.
class RveProblem {
 public:
  RveProblem(double xi, const constitutive::FluidLaw& law, double target_h = 0.05, CellSolverConfig config = {});
  /// Cell mesh given explicitly (P1 or P2, unit square with periodic pairs).
  RveProblem(mesh::Mesh cell_mesh, const constitutive::FluidLaw& law, CellSolverConfig config = {});
  ~RveProblem();

  double xi() const { return xi_; }
  const mesh::Mesh& mesh() const { return mesh_; }
  const fem::DofMap& dofs() const { return *dofs_; }
  const constitutive::FluidLaw& law() const { return law_; }
  const CellSolverConfig& config() const { return config_; }

  /// |fluid part| / |cell|
  double porosity() const;
  double cell_area() const { return cell_area_; }

  /// Thread-safe.
  CellSolution solve_cell(const Vec2& gradient, const Vec2& body, const CellSolution* warm = nullptr) const;
  /// ubar = phi <u> = (1/|cell|) int_fluid u
  Vec2 seepage_flux(const CellSolution& s) const;
  /// K with d ubar / d g = -K, from the linearized cell problem at the state.
  Mat2 tangent_permeability(const CellSolution& s) const;

  /// Raw residual of the unconstrained cell equations.
  Eigen::VectorXd raw_residual(const CellSolution& s) const;

  /// Sub-scale fields at a cell point (wrapped into the unit cell); empty inside the obstacle.
  std::optional<Vec2> velocity_at(const CellSolution& s, const Vec2& y) const;
  std::optional<double> pressure_at(const CellSolution& s, const Vec2& y) const;

 private:
  void setup();
  class CellSystem;
  const linsolve::SparseLU& newtonian_factor() const;
  Vec2 reduced_flux(const Eigen::VectorXd& direction) const;
  void finish(CellSolution& s) const;

  double xi_ = 0.0;
  constitutive::FluidLaw law_;
  CellSolverConfig config_;
  mesh::Mesh mesh_;
  std::unique_ptr<fem::DofMap> dofs_;
  std::unique_ptr<mesh::PointLocator> locator_;
  fem::SparseMatrix pattern_;
  Eigen::Matrix<double, Eigen::Dynamic, 2> raw_load_;  // int N_i e_k on raw DOFs
  Eigen::Matrix<double, Eigen::Dynamic, 2> load_;      // reduced load of a unit drive e_k
  Eigen::Matrix<double, 2, Eigen::Dynamic> flux_;   // reduced flux functional
  double cell_area_ = 1.0;
  double fluid_area_ = 0.0;

  mutable std::once_flag newtonian_once_;
  mutable std::unique_ptr<linsolve::SparseLU> newtonian_lu_;
  mutable fem::SparseMatrix newtonian_jacobian_;
  mutable Mat2 newtonian_k_ = Mat2::Zero();
};

}  // namespace rebarflow::micro
