#pragma once

#include <Eigen/Core>
#include <vector>

namespace rebarflow::fem {

struct QuadraturePoint {
  Eigen::Vector3d bary;
  double weight;
};

/// Rule on the reference triangle; weights sum to its area 1/2.
struct QuadratureRule {
  std::vector<QuadraturePoint> points;
  int degree = 0;
};

/// Interior 3-point rule, exact for degree 2.
const QuadratureRule& triangle_rule_3();
/// 7-point Radon rule, exact for degree 5.
const QuadratureRule& triangle_rule_7();
/// Collapsed (Duffy) tensor Gauss rule with n x n points, exact for degree 2n - 2.
QuadratureRule triangle_rule_conical(int n);

struct LineRule {
  std::vector<double> t;  // on [0, 1]
  std::vector<double> w;  // sum to 1
};

/// n-point Gauss-Legendre rule on [0, 1].
LineRule gauss_legendre(int n);
const LineRule& line_rule_3();

}  // namespace rebarflow::fem
