#pragma once

#include <Eigen/Core>
#include <array>

#include "rebarflow/common.hpp"

namespace rebarflow::fem {

using Grad6 = Eigen::Matrix<double, 6, 2>;
using Grad3 = Eigen::Matrix<double, 3, 2>;

/// P2 shape values in barycentric coordinates. Local node order:
/// vertices 0,1,2 then midpoints of (0,1), (1,2), (2,0).
Eigen::Matrix<double, 6, 1> p2_values(const Eigen::Vector3d& l);
/// Derivatives with respect to reference coordinates (xi = l1, eta = l2).
Grad6 p2_reference_gradients(const Eigen::Vector3d& l);

Eigen::Vector3d p1_values(const Eigen::Vector3d& l);
Grad3 p1_reference_gradients();

/// Quadratic trace on an edge (a, b) with midpoint, t in [0, 1]: values for [a, mid, b].
Eigen::Vector3d p2_edge_values(double t);

/// Affine map of a straight triangle.
struct ElementGeometry {
  std::array<Vec2, 3> vertices;
  Mat2 jacobian;      // columns x1 - x0, x2 - x0
  Mat2 inverse_transpose;
  double det = 0.0;   // twice the signed area

  explicit ElementGeometry(const std::array<Vec2, 3>& v);
  Vec2 map(const Eigen::Vector3d& l) const;
  Vec2 centroid() const;
  double area() const { return 0.5 * det; }
  /// Physical gradients from reference gradients (one row per shape function).
  template <int N>
  Eigen::Matrix<double, N, 2> physical(const Eigen::Matrix<double, N, 2>& ref) const {
    return ref * inverse_transpose.transpose();
  }
};

/// Barycentric coordinates of p with respect to the triangle.
Eigen::Vector3d barycentric(const std::array<Vec2, 3>& v, const Vec2& p);

}  // namespace rebarflow::fem
