#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rebarflow/fem/quadrature.hpp"
#include "rebarflow/fem/reference_element.hpp"

using namespace rebarflow;
using namespace rebarflow::fem;

namespace {

// int_T x^a y^b over the reference triangle = a! b! / (a + b + 2)!
double monomial_integral(int a, int b) {
  return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
}

double integrate(const QuadratureRule& rule, int a, int b) {
  double s = 0.0;
  for (const auto& q : rule.points) s += q.weight * std::pow(q.bary[1], a) * std::pow(q.bary[2], b);
  return s;
}

void expect_exact_to(const QuadratureRule& rule, int degree) {
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b)
      EXPECT_NEAR(integrate(rule, a, b), monomial_integral(a, b), 1e-15) << "x^" << a << " y^" << b;
}

}  // namespace

TEST(Quadrature, WeightsSumToReferenceArea) {
  for (const auto* r : {&triangle_rule_3(), &triangle_rule_7()}) {
    double s = 0.0;
    for (const auto& q : r->points) s += q.weight;
    EXPECT_NEAR(s, 0.5, 1e-15);
  }
}

TEST(Quadrature, ThreePointRuleExactForQuadratics) {
  expect_exact_to(triangle_rule_3(), 2);
  EXPECT_GT(std::abs(integrate(triangle_rule_3(), 3, 0) - monomial_integral(3, 0)), 1e-6);
}

TEST(Quadrature, SevenPointRuleExactForQuintics) {
  expect_exact_to(triangle_rule_7(), 5);
  EXPECT_GT(std::abs(integrate(triangle_rule_7(), 6, 0) - monomial_integral(6, 0)), 1e-8);
}

TEST(Quadrature, ConicalRuleDegree) { expect_exact_to(triangle_rule_conical(6), 10); }

TEST(Quadrature, GaussLegendreOnUnitInterval) {
  const auto r = gauss_legendre(4);
  for (int k = 0; k <= 7; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.t.size(); ++i) s += r.w[i] * std::pow(r.t[i], k);
    EXPECT_NEAR(s, 1.0 / (k + 1), 1e-15);
  }
}

TEST(ShapeFunctions, KroneckerPropertyAtNodes) {
  const Eigen::Vector3d nodes[6] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}};
  for (int i = 0; i < 6; ++i) {
    const auto n = p2_values(nodes[i]);
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(n[j], i == j ? 1.0 : 0.0, 1e-15);
  }
}

TEST(ShapeFunctions, CentroidP1Values) {
  const auto v = p1_values(Eigen::Vector3d::Constant(1.0 / 3.0));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(v[i], 1.0 / 3.0, 1e-16);
}

TEST(ShapeFunctions, PartitionOfUnityAndGradientsByDifferences) {
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    double xi = u(gen), eta = u(gen);
    if (xi + eta > 1.0) xi = 1.0 - xi, eta = 1.0 - eta;
    const Eigen::Vector3d l(1.0 - xi - eta, xi, eta);
    EXPECT_NEAR(p2_values(l).sum(), 1.0, 1e-14);
    const auto g = p2_reference_gradients(l);
    EXPECT_NEAR(g.col(0).sum(), 0.0, 1e-13);
    EXPECT_NEAR(g.col(1).sum(), 0.0, 1e-13);
    const double h = 1e-6;
    const Eigen::Matrix<double, 6, 1> dxi = (p2_values(l + h * Eigen::Vector3d(-1, 1, 0)) - p2_values(l - h * Eigen::Vector3d(-1, 1, 0))) / (2 * h);
    const Eigen::Matrix<double, 6, 1> deta = (p2_values(l + h * Eigen::Vector3d(-1, 0, 1)) - p2_values(l - h * Eigen::Vector3d(-1, 0, 1))) / (2 * h);
    EXPECT_LT((dxi - g.col(0)).norm(), 1e-8);
    EXPECT_LT((deta - g.col(1)).norm(), 1e-8);
  }
}

TEST(ShapeFunctions, EdgeTraceMatchesVolumeFunctions) {
  for (double t : {0.0, 0.2, 0.5, 0.9}) {
    const auto e = p2_edge_values(t);
    const auto n = p2_values(Eigen::Vector3d(1.0 - t, t, 0.0));
    EXPECT_NEAR(e[0], n[0], 1e-15);
    EXPECT_NEAR(e[1], n[3], 1e-15);
    EXPECT_NEAR(e[2], n[1], 1e-15);
  }
}

TEST(ElementGeometry, MapAndBarycentricAreInverse) {
  const std::array<Vec2, 3> v{Vec2(0.3, 0.1), Vec2(1.4, 0.5), Vec2(0.2, 1.7)};
  const ElementGeometry geo(v);
  EXPECT_GT(geo.det, 0.0);
  const Eigen::Vector3d l(0.2, 0.5, 0.3);
  EXPECT_LT((barycentric(v, geo.map(l)) - l).norm(), 1e-14);
  // physical gradients of P1 functions reproduce x and y
  const auto g = geo.physical<3>(p1_reference_gradients());
  Vec2 gx = Vec2::Zero(), gy = Vec2::Zero();
  for (int i = 0; i < 3; ++i) gx += v[i].x() * g.row(i).transpose(), gy += v[i].y() * g.row(i).transpose();
  EXPECT_LT((gx - Vec2(1, 0)).norm(), 1e-14);
  EXPECT_LT((gy - Vec2(0, 1)).norm(), 1e-14);
}
