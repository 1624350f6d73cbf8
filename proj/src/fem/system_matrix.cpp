#include "rebarflow/fem/system_matrix.hpp"

#include <algorithm>
#include <string>

namespace rebarflow::fem {

SparsityBuilder::SparsityBuilder(const DofMap& dofs) : dofs_(&dofs), columns_(dofs.num_reduced()) {
  if (!dofs.finalized()) throw SolverError("DofMap must be finalized before building the pattern");
}

void SparsityBuilder::add_group(std::span<const int> raw) {
  std::vector<int> reduced;
  for (int r : raw) {
    if (r < 0) continue;
    for (const auto& t : dofs_->expansion(r)) reduced.push_back(t.reduced);
  }
  std::sort(reduced.begin(), reduced.end());
  reduced.erase(std::unique(reduced.begin(), reduced.end()), reduced.end());
  for (int c : reduced) {
    auto& col = columns_[c];
    col.insert(col.end(), reduced.begin(), reduced.end());
  }
}

SparseMatrix SparsityBuilder::build() const {
  const int n = dofs_->num_reduced();
  SparseMatrix m(n, n);
  std::vector<std::vector<int>> cols = columns_;
  Eigen::VectorXi nnz(n);
  for (int c = 0; c < n; ++c) {
    auto& col = cols[c];
    col.push_back(c);  // keep the diagonal even when it is structurally zero
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
    nnz[c] = static_cast<int>(col.size());
  }
  m.reserve(nnz);
  for (int c = 0; c < n; ++c)
    for (int r : cols[c]) m.insert(r, c) = 0.0;
  m.makeCompressed();
  return m;
}

Accumulator::Accumulator(const DofMap& dofs, Eigen::VectorXd* residual, SparseMatrix* jacobian)
    : dofs_(&dofs), residual_(residual), jacobian_(jacobian) {}

Accumulator Accumulator::raw(const DofMap& dofs, Eigen::VectorXd* residual) {
  Accumulator a(dofs, residual, nullptr);
  a.raw_mode_ = true;
  return a;
}

void Accumulator::add_vector(std::span<const int> raw, const double* values) {
  if (!residual_) return;
  auto& r = *residual_;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < 0 || values[i] == 0.0) continue;
    if (raw_mode_) {
      r[raw[i]] += values[i];
      continue;
    }
    for (const auto& t : dofs_->expansion(raw[i])) r[t.reduced] += t.coef * values[i];
  }
}

double& Accumulator::entry(int row, int col) {
  auto& m = *jacobian_;
  const int* inner = m.innerIndexPtr();
  const int b = m.outerIndexPtr()[col], e = m.outerIndexPtr()[col + 1];
  const int* it = std::lower_bound(inner + b, inner + e, row);
  if (it == inner + e || *it != row)
    throw SolverError("entry (" + std::to_string(row) + ", " + std::to_string(col) + ") outside sparsity pattern");
  return m.valuePtr()[it - inner];
}

void Accumulator::add_matrix(std::span<const int> rows, std::span<const int> cols, const double* values) {
  if (!jacobian_ || raw_mode_) return;
  const std::size_t nr = rows.size();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0) continue;
    const auto ce = dofs_->expansion(cols[j]);
    if (ce.empty()) continue;
    for (std::size_t i = 0; i < nr; ++i) {
      const double v = values[j * nr + i];
      if (rows[i] < 0 || v == 0.0) continue;
      for (const auto& rt : dofs_->expansion(rows[i]))
        for (const auto& ct : ce) entry(rt.reduced, ct.reduced) += rt.coef * ct.coef * v;
    }
  }
}

void zero_values(SparseMatrix& m) {
  std::fill(m.valuePtr(), m.valuePtr() + m.nonZeros(), 0.0);
}

}  // namespace rebarflow::fem
