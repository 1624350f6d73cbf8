#pragma once

#include <functional>
#include <vector>

#include "rebarflow/mesh/mesh.hpp"

namespace rebarflow::mesh {

/// Straight segment of a planar straight-line graph. Segments on a circle
/// carry the circle index so that refinement keeps new points on the arc.
/// A periodic pair is linked through `partner`, with
/// partner endpoints = own endpoints + shift (same order).
struct PslgSegment {
  int a = -1;
  int b = -1;
  BoundaryTag tag = BoundaryTag::SlipWall;
  int circle = -1;
  int partner = -1;
  Vec2 shift = Vec2::Zero();
};

struct Zone {
  std::vector<Vec2> polygon;
  Region region = Region::Fluid;
};

struct Pslg {
  std::vector<Vec2> points;
  std::vector<PslgSegment> segments;
  /// Holes; circle segments refer to these by index.
  std::vector<Disk> holes;
  /// First zone containing a triangle's centroid sets its region.
  std::vector<Zone> zones;
  /// Optional outline of the meshed region when the hull is not convex.
  std::vector<Vec2> domain;
  /// Hole centres are inserted as temporary vertices unless disabled.
  bool insert_hole_centers = true;
  Region default_region = Region::Fluid;
  std::function<double(const Vec2&)> sizing;
  double h_max = 1.0;
  int smoothing_sweeps = 5;
};

/// Conforming Delaunay mesh of a rectangular hull with holes and internal
/// segments. Every input segment (after possible splitting) becomes a mesh
/// edge and is emitted as a boundary edge with its tag.
Mesh triangulate_pslg(Pslg pslg);

}  // namespace rebarflow::mesh
