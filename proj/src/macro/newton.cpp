#include "rebarflow/macro/newton.hpp"

#include <algorithm>
#include <cstdio>

#include "rebarflow/common.hpp"
#include "rebarflow/linsolve/sparse_lu.hpp"

namespace rebarflow::macro {

NewtonResult newton_solve(NonlinearSystem& system, Eigen::VectorXd x0, const NewtonConfig& config) {
  if (x0.size() != system.size()) throw SolverError("initial guess has wrong size");
  NewtonResult out;
  out.x = std::move(x0);
  Eigen::VectorXd r(system.size());
  SparseMatrix jac;
  system.evaluate(out.x, r, nullptr);
  double norm = r.norm();
  const double ref = config.reference_norm > 0.0 ? config.reference_norm : norm;
  const double target = std::max(config.tol_rel * ref, config.abs_tol);
  out.history.push_back({0, norm, 0.0, system.cell_solves(), 0.0});

  linsolve::SparseLU lu;
  Eigen::VectorXd trial_r(system.size());
  for (int k = 1; norm > target; ++k) {
    if (k > config.max_iterations)
      throw SolverError("Newton did not converge in " + std::to_string(config.max_iterations) +
                        " iterations\n" + format_history(out.history));
    system.evaluate(out.x, r, &jac);
    lu.factorize(jac);
    const Eigen::VectorXd rhs = -r;
    Eigen::VectorXd dx = lu.solve(rhs);
    double lin = linsolve::relative_residual(jac, dx, rhs);
    for (int refine = 0; refine < 2 && lin > 1e-12; ++refine) {
      dx += lu.solve(rhs - jac * dx);
      lin = linsolve::relative_residual(jac, dx, rhs);
    }

    double lambda = 1.0;
    Eigen::VectorXd trial;
    double trial_norm = 0.0;
    for (;;) {
      trial = out.x + lambda * dx;
      system.evaluate(trial, trial_r, nullptr);
      trial_norm = trial_r.norm();
      if (std::isfinite(trial_norm) && trial_norm <= (1.0 - config.sigma * lambda) * norm) break;
      lambda *= config.rho;
      if (lambda < config.min_step)
        throw SolverError("line search failed\n" + format_history(out.history));
    }
    out.x = std::move(trial);
    r = trial_r;
    norm = trial_norm;
    out.iterations = k;
    out.history.push_back({k, norm, lambda, system.cell_solves(), lin});
  }
  return out;
}

std::string format_history(const std::vector<NewtonIteration>& history) {
  std::string s;
  char line[160];
  for (const auto& it : history) {
    std::snprintf(line, sizeof line, "%d %.6e %.6e %ld\n", it.index, it.residual, it.step, it.cell_solves);
    s += line;
  }
  return s;
}

}  // namespace rebarflow::macro
