#include "rebarflow/fem/reference_element.hpp"

#include <Eigen/LU>

namespace rebarflow::fem {

Eigen::Matrix<double, 6, 1> p2_values(const Eigen::Vector3d& l) {
  Eigen::Matrix<double, 6, 1> n;
  n << l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
      4.0 * l[0] * l[1], 4.0 * l[1] * l[2], 4.0 * l[2] * l[0];
  return n;
}

Grad6 p2_reference_gradients(const Eigen::Vector3d& l) {
  Grad6 g;
  const double a = 4.0 * l[0] - 1.0;
  g << -a, -a,
      4.0 * l[1] - 1.0, 0.0,
      0.0, 4.0 * l[2] - 1.0,
      4.0 * (l[0] - l[1]), -4.0 * l[1],
      4.0 * l[2], 4.0 * l[1],
      -4.0 * l[2], 4.0 * (l[0] - l[2]);
  return g;
}

Eigen::Vector3d p1_values(const Eigen::Vector3d& l) { return l; }

Grad3 p1_reference_gradients() {
  Grad3 g;
  g << -1.0, -1.0, 1.0, 0.0, 0.0, 1.0;
  return g;
}

Eigen::Vector3d p2_edge_values(double t) {
  return {(1.0 - t) * (1.0 - 2.0 * t), 4.0 * t * (1.0 - t), t * (2.0 * t - 1.0)};
}

ElementGeometry::ElementGeometry(const std::array<Vec2, 3>& v) : vertices(v) {
  jacobian.col(0) = v[1] - v[0];
  jacobian.col(1) = v[2] - v[0];
  det = jacobian.determinant();
  if (det == 0.0) throw MeshError("degenerate triangle");
  inverse_transpose = jacobian.inverse().transpose();
}

Vec2 ElementGeometry::map(const Eigen::Vector3d& l) const {
  return l[0] * vertices[0] + l[1] * vertices[1] + l[2] * vertices[2];
}

Vec2 ElementGeometry::centroid() const { return (vertices[0] + vertices[1] + vertices[2]) / 3.0; }

Eigen::Vector3d barycentric(const std::array<Vec2, 3>& v, const Vec2& p) {
  Mat2 j;
  j.col(0) = v[1] - v[0];
  j.col(1) = v[2] - v[0];
  const Vec2 s = j.inverse() * (p - v[0]);
  return {1.0 - s.x() - s.y(), s.x(), s.y()};
}

}  // namespace rebarflow::fem
