#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <span>
#include <vector>

#include "rebarflow/fem/dof_map.hpp"

namespace rebarflow::fem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Collects the reduced sparsity pattern from groups of coupled raw DOFs.
/// Every pair inside a group is entered in both orders, so the result is
/// structurally symmetric and keeps explicit zeros (e.g. pressure diagonals).
class SparsityBuilder {
 public:
  explicit SparsityBuilder(const DofMap& dofs);
  void add_group(std::span<const int> raw);
  SparseMatrix build() const;

 private:
  const DofMap* dofs_;
  std::vector<std::vector<int>> columns_;
};

/// Scatters element contributions through the constraint elimination.
/// In raw mode the vector is indexed by raw DOFs and no matrix is assembled.
class Accumulator {
 public:
  Accumulator(const DofMap& dofs, Eigen::VectorXd* residual, SparseMatrix* jacobian);
  static Accumulator raw(const DofMap& dofs, Eigen::VectorXd* residual);

  bool wants_vector() const { return residual_ != nullptr; }
  bool wants_matrix() const { return jacobian_ != nullptr; }

  void add_vector(std::span<const int> raw, const double* values);
  /// Local matrix in column-major storage, rows.size() x cols.size().
  void add_matrix(std::span<const int> rows, std::span<const int> cols, const double* values);

 private:
  double& entry(int row, int col);

  const DofMap* dofs_;
  Eigen::VectorXd* residual_;
  SparseMatrix* jacobian_;
  bool raw_mode_ = false;
};

/// Sets all stored values to zero without touching the pattern.
void zero_values(SparseMatrix& m);

}  // namespace rebarflow::fem
