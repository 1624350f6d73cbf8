#include "rebarflow/mesh/delaunay.hpp"

#include <boost/polygon/voronoi.hpp>
#include <algorithm>
#include <cmath>
#include <map>

namespace rebarflow::mesh {

namespace bp = boost::polygon;

std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points) {
  std::vector<std::array<int, 3>> tris;
  if (points.size() < 3) return tris;

  Vec2 lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double extent = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  if (!(extent > 0.0)) throw MeshError("degenerate point set");
  // The Voronoi builder works on 32-bit integers with exact predicates.
  const double scale = static_cast<double>(1 << 30) / extent;

  std::vector<bp::point_data<int>> sites;
  sites.reserve(points.size());
  std::map<std::pair<int, int>, int> seen;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int x = static_cast<int>(std::llround((points[i].x() - lo.x()) * scale));
    const int y = static_cast<int>(std::llround((points[i].y() - lo.y()) * scale));
    if (!seen.emplace(std::make_pair(x, y), static_cast<int>(i)).second)
      throw MeshError("coincident points in triangulation input");
    sites.emplace_back(x, y);
  }

  bp::voronoi_diagram<double> vd;
  bp::construct_voronoi(sites.begin(), sites.end(), &vd);

  auto area2 = [&](int a, int b, int c) {
    const Vec2 u = points[b] - points[a], v = points[c] - points[a];
    return u.x() * v.y() - u.y() * v.x();
  };

  std::vector<int> ring;
  for (const auto& vertex : vd.vertices()) {
    ring.clear();
    const auto* start = vertex.incident_edge();
    const auto* e = start;
    do {
      ring.push_back(static_cast<int>(e->cell()->source_index()));
      e = e->rot_next();
    } while (e != start);
    for (std::size_t k = 1; k + 1 < ring.size(); ++k) {
      std::array<int, 3> t{ring[0], ring[k], ring[k + 1]};
      const double a2 = area2(t[0], t[1], t[2]);
      // Snapping can turn collinear hull points into slivers; drop them.
      const double longest = std::max({(points[t[1]] - points[t[0]]).squaredNorm(),
                                       (points[t[2]] - points[t[1]]).squaredNorm(),
                                       (points[t[0]] - points[t[2]]).squaredNorm()});
      if (std::abs(a2) <= 1e-10 * longest) continue;
      if (a2 < 0.0) std::swap(t[1], t[2]);
      tris.push_back(t);
    }
  }
  return tris;
}

}  // namespace rebarflow::mesh
