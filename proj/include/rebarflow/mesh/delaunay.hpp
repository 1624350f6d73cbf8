#pragma once

#include <array>
#include <vector>

#include "rebarflow/common.hpp"

namespace rebarflow::mesh {

/// Delaunay triangulation of the convex hull of a point set, returned as
/// counterclockwise vertex triples. Co-circular clusters are fanned.
/// Points closer than the integer snapping resolution (about 1e-9 of the
/// bounding box) are rejected.
std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points);

}  // namespace rebarflow::mesh
