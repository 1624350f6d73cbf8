#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "rebarflow/mesh/mesh.hpp"

namespace rebarflow::mesh {

struct Location {
  int triangle = -1;
  /// Barycentric coordinates with respect to the triangle's vertices.
  Eigen::Vector3d bary = Eigen::Vector3d::Zero();
};

/// Bucket grid over triangle bounding boxes.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);

  /// Containing triangle, accepting points up to `tol` (relative to the
  /// element size) outside an element. Empty outside the mesh.
  std::optional<Location> locate(const Vec2& p, double tol = 1e-9) const;

 private:
  const Mesh& mesh_;
  Vec2 lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace rebarflow::mesh
