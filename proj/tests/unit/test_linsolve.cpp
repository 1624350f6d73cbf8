#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "rebarflow/common.hpp"
#include "rebarflow/linsolve/sparse_lu.hpp"

using namespace rebarflow;
using namespace rebarflow::linsolve;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& d) {
  SparseMatrix s = d.sparseView();
  s.makeCompressed();
  return s;
}

}  // namespace

TEST(SparseLU, IdentityReturnsRhs) {
  SparseMatrix a(5, 5);
  a.setIdentity();
  SparseLU lu;
  lu.factorize(a);
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 1, 5);
  EXPECT_EQ(lu.solve(b), b);
}

TEST(SparseLU, SmallSaddlePoint) {
  Eigen::MatrixXd d(2, 2);
  d << 1, 1, 1, 0;
  SparseLU lu;
  lu.factorize(from_dense(d));
  const auto x = lu.solve(Eigen::Vector2d(2, 1));
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
}

TEST(SparseLU, RandomSpdResidual) {
  std::mt19937 gen(42);
  std::normal_distribution<double> n;
  Eigen::MatrixXd r(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) r(i, j) = n(gen);
  const Eigen::MatrixXd spd = r * r.transpose() + 50 * Eigen::MatrixXd::Identity(50, 50);
  Eigen::VectorXd b(50);
  for (int i = 0; i < 50; ++i) b[i] = n(gen);
  const auto a = from_dense(spd);
  SparseLU lu;
  lu.factorize(a);
  EXPECT_LT(relative_residual(a, lu.solve(b), b), 1e-12);
}

// Stokes-like block [[A, B^T], [B, 0]] with an explicit zero block in the pattern.
TEST(SparseLU, IndefiniteBlockSystem) {
  const int n = 40, m = 10;
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 4.0);
    if (i + 1 < n) t.emplace_back(i, i + 1, -1.0), t.emplace_back(i + 1, i, -1.0);
  }
  for (int k = 0; k < m; ++k)
    for (int j = 4 * k; j < 4 * k + 4; ++j) {
      const double v = u(gen) + (j == 4 * k ? 2.0 : 0.0);
      t.emplace_back(n + k, j, v), t.emplace_back(j, n + k, v);
    }
  for (int k = 0; k < m; ++k) t.emplace_back(n + k, n + k, 0.0);
  SparseMatrix a(n + m, n + m);
  a.setFromTriplets(t.begin(), t.end());
  Eigen::VectorXd b = Eigen::VectorXd::Ones(n + m);
  SparseLU lu;
  lu.factorize(a);
  const auto x = lu.solve(b);
  EXPECT_LT(relative_residual(a, x, b), 1e-12);
  // refactorization with the same pattern reuses the analysis
  a *= 2.0;
  lu.factorize(a);
  EXPECT_LT((lu.solve(b) - 0.5 * x).norm(), 1e-12 * x.norm());
}

TEST(SparseLU, EmptyColumnReportsDof) {
  SparseMatrix a(3, 3);
  a.insert(0, 0) = 1.0;
  a.insert(2, 2) = 1.0;
  a.insert(1, 0) = 1.0;
  SparseLU lu;
  try {
    lu.factorize(a);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("DOF 1"), std::string::npos) << e.what();
  }
  EXPECT_FALSE(lu.ready());
}

TEST(SparseLU, NumericallySingularThrows) {
  Eigen::MatrixXd d(3, 3);
  d << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  SparseLU lu;
  try {
    lu.factorize(from_dense(d));
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_NE(std::string(e.what()).find("zero pivot"), std::string::npos) << e.what();
  }
}

TEST(SparseLU, SolveBeforeFactorizeThrows) {
  SparseLU lu;
  EXPECT_THROW(lu.solve(Eigen::VectorXd::Ones(2)), SolverError);
  SparseMatrix rect(2, 3);
  EXPECT_THROW(lu.factorize(rect), SolverError);
}

TEST(SparseLU, DeterministicSolutions) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Random(30, 30) + 30 * Eigen::MatrixXd::Identity(30, 30);
  const auto a = from_dense(d);
  const Eigen::VectorXd b = Eigen::VectorXd::Random(30);
  SparseLU l1, l2;
  l1.factorize(a);
  l2.factorize(a);
  EXPECT_EQ(l1.solve(b), l2.solve(b));
}
