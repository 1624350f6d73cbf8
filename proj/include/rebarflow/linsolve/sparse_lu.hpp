#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>

namespace rebarflow::linsolve {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Direct LU factorization with pivoting, UMFPACK when available and Eigen's
/// SparseLU otherwise. Singular matrices raise SolverError naming the first
/// zero-pivot column.
class SparseLU {
 public:
  SparseLU();
  ~SparseLU();
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;

  /// Symbolic analysis is reused while the pattern stays the same.
  void factorize(const SparseMatrix& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  bool ready() const;
  static bool uses_umfpack();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// ||A x - b|| / ||b||, or ||A x|| when b = 0.
double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

}  // namespace rebarflow::linsolve
