#include "rebarflow/mesh/point_locator.hpp"

#include <algorithm>
#include <cmath>

namespace rebarflow::mesh {

PointLocator::PointLocator(const Mesh& mesh) : mesh_(mesh) {
  if (mesh.triangles.empty()) throw MeshError("cannot locate points in an empty mesh");
  Vec2 lo = mesh.nodes[mesh.triangles[0].nodes[0]], hi = lo;
  for (int v = 0; v < mesh.num_vertices; ++v) {
    lo = lo.cwiseMin(mesh.nodes[v]);
    hi = hi.cwiseMax(mesh.nodes[v]);
  }
  const double w = std::max(hi.x() - lo.x(), 1e-12), h = std::max(hi.y() - lo.y(), 1e-12);
  cell_ = std::sqrt(w * h / std::max<std::size_t>(1, mesh.triangles.size())) * 1.5;
  nx_ = std::clamp(static_cast<int>(std::ceil(w / cell_)), 1, 4096);
  ny_ = std::clamp(static_cast<int>(std::ceil(h / cell_)), 1, 4096);
  cell_ = std::max(w / nx_, h / ny_);
  lo_ = lo;
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& n = mesh.triangles[t].nodes;
    Vec2 a = mesh.nodes[n[0]], b = a;
    for (int k = 1; k < 3; ++k) {
      a = a.cwiseMin(mesh.nodes[n[k]]);
      b = b.cwiseMax(mesh.nodes[n[k]]);
    }
    const int i0 = std::clamp(static_cast<int>((a.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((b.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((a.y() - lo_.y()) / cell_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((b.y() - lo_.y()) / cell_), 0, ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[j * nx_ + i].push_back(t);
  }
}

std::optional<Location> PointLocator::locate(const Vec2& p, double tol) const {
  const double fi = (p.x() - lo_.x()) / cell_, fj = (p.y() - lo_.y()) / cell_;
  if (fi < -1.0 || fj < -1.0 || fi > nx_ + 1.0 || fj > ny_ + 1.0) return std::nullopt;
  const int ci = std::clamp(static_cast<int>(fi), 0, nx_ - 1);
  const int cj = std::clamp(static_cast<int>(fj), 0, ny_ - 1);
  std::optional<Location> best;
  double best_violation = tol;
  for (int j = std::max(0, cj - 1); j <= std::min(ny_ - 1, cj + 1); ++j) {
    for (int i = std::max(0, ci - 1); i <= std::min(nx_ - 1, ci + 1); ++i) {
      for (int t : buckets_[j * nx_ + i]) {
        const auto& n = mesh_.triangles[t].nodes;
        const Vec2& a = mesh_.nodes[n[0]];
        const Vec2& b = mesh_.nodes[n[1]];
        const Vec2& c = mesh_.nodes[n[2]];
        const double det = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
        const double l1 = ((p - a).x() * (c - a).y() - (p - a).y() * (c - a).x()) / det;
        const double l2 = ((b - a).x() * (p - a).y() - (b - a).y() * (p - a).x()) / det;
        const double l0 = 1.0 - l1 - l2;
        const double violation = -std::min({l0, l1, l2});
        if (violation <= 0.0) return Location{t, Eigen::Vector3d(l0, l1, l2)};
        if (violation < best_violation) {
          best_violation = violation;
          best = Location{t, Eigen::Vector3d(l0, l1, l2)};
        }
      }
    }
  }
  return best;
}

}  // namespace rebarflow::mesh
