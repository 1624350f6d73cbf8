#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cmath>
#include <string>
#include <vector>

namespace rebarflow::macro {

using SparseMatrix = Eigen::SparseMatrix<double>;

class NonlinearSystem {
 public:
  virtual ~NonlinearSystem() = default;
  virtual int size() const = 0;
  /// Residual at x, plus the Jacobian when requested. The Jacobian pattern
  /// must not change between calls.
  virtual void evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& r, SparseMatrix* jacobian) = 0;
  /// Running count of sub-scale solves, 0 for systems without any.
  virtual long cell_solves() const { return 0; }
};

struct NewtonConfig {
  double tol_rel = 1e-8;
  double abs_tol = 1e-12;
  int max_iterations = 50;
  double sigma = 1e-4;
  double rho = 0.5;
  double min_step = std::ldexp(1.0, -30);
  /// Norm the relative tolerance refers to; the initial residual when <= 0.
  double reference_norm = 0.0;
};

struct NewtonIteration {
  int index = 0;
  double residual = 0.0;
  double step = 0.0;  // accepted lambda, 0 for the initial state
  long cell_solves = 0;
  double linear_residual = 0.0;
};

struct NewtonResult {
  Eigen::VectorXd x;
  std::vector<NewtonIteration> history;
  int iterations = 0;
};

/// Newton's method with backtracking: a step is accepted once
/// ||r(x + l dx)|| <= (1 - sigma l) ||r(x)||, l in {1, rho, rho^2, ...}.
/// Throws SolverError on line-search failure or non-convergence.
NewtonResult newton_solve(NonlinearSystem& system, Eigen::VectorXd x0, const NewtonConfig& config);

/// One line per iteration: index, residual, lambda, cell solves.
std::string format_history(const std::vector<NewtonIteration>& history);

}  // namespace rebarflow::macro
