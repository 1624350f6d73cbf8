#include "rebarflow/linsolve/sparse_lu.hpp"

#include <Eigen/SparseLU>
#include <mutex>
#include <string>

#include "rebarflow/common.hpp"

#ifdef REBARFLOW_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace rebarflow::linsolve {

namespace {

/// First column with an empty or all-zero structure, -1 if none.
int first_empty_column(const SparseMatrix& a) {
  for (int c = 0; c < a.outerSize(); ++c) {
    bool any = false;
    for (SparseMatrix::InnerIterator it(a, c); it; ++it)
      if (it.value() != 0.0) any = true;
    if (!any) return c;
  }
  return -1;
}

}  // namespace

struct SparseLU::Impl {
#ifdef REBARFLOW_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
  // UMFPACK keeps referring to the factored matrix during solves.
  SparseMatrix matrix;
  bool analyzed = false;
  bool factored = false;
  Eigen::Index rows = -1, nnz = -1;
  // The backends keep scratch state in the solver object.
  std::mutex solve_mutex;
};

SparseLU::SparseLU() : impl_(std::make_unique<Impl>()) {
#ifdef REBARFLOW_HAVE_UMFPACK
  // The saddle-point systems are structurally symmetric.
  impl_->lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
#endif
}
SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

bool SparseLU::uses_umfpack() {
#ifdef REBARFLOW_HAVE_UMFPACK
  return true;
#else
  return false;
#endif
}

bool SparseLU::ready() const { return impl_->factored; }

void SparseLU::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw SolverError("factorize: matrix is not square");
  impl_->factored = false;
  if (a.rows() == 0) {
    impl_->factored = true;
    return;
  }
  SparseMatrix& m = impl_->matrix;
  m = a;
  m.makeCompressed();
  if (const int c = first_empty_column(m); c >= 0)
    throw SolverError("singular matrix: zero pivot at DOF " + std::to_string(c));
  if (!impl_->analyzed || impl_->rows != m.rows() || impl_->nnz != m.nonZeros()) {
    impl_->lu.analyzePattern(m);
    impl_->analyzed = true;
    impl_->rows = m.rows();
    impl_->nnz = m.nonZeros();
  }
  impl_->lu.factorize(m);
  if (impl_->lu.info() != Eigen::Success) {
#ifdef REBARFLOW_HAVE_UMFPACK
    // Locate the zero diagonal of U and map it back through the column permutation.
    const auto& u = impl_->lu.matrixU();
    const auto& q = impl_->lu.permutationQ();
    int col = -1;
    for (int k = 0; k < u.cols() && col < 0; ++k) {
      double d = 0.0;
      for (SparseMatrix::InnerIterator it(u, k); it; ++it)
        if (it.row() == k) d = it.value();
      if (d == 0.0) col = q[k];
    }
    impl_->analyzed = false;
    throw SolverError("singular matrix: zero pivot at DOF " + std::to_string(col));
#else
    impl_->analyzed = false;
    throw SolverError("singular matrix: " + impl_->lu.lastErrorMessage());
#endif
  }
  impl_->factored = true;
}

Eigen::VectorXd SparseLU::solve(const Eigen::VectorXd& b) const {
  if (!impl_->factored) throw SolverError("solve called before a successful factorization");
  if (b.size() == 0) return b;
  Eigen::VectorXd x;
  {
    std::lock_guard lock(impl_->solve_mutex);
    x = impl_->lu.solve(b);
  }
  if (!x.allFinite()) throw SolverError("linear solve produced non-finite values");
  return x;
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double nr = (a * x - b).norm();
  return nb > 0.0 ? nr / nb : nr;
}

}  // namespace rebarflow::linsolve
