#pragma once

#include <vector>

#include "rebarflow/mesh/mesh.hpp"

namespace rebarflow::mesh {

struct Rectangle {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 1.0;
  double height = 1.0;
};

/// rows x cols unit cells of size cell_size with a centred disk of radius
/// `radius` each. The lower-left corner of the unrotated grid is `origin`;
/// the whole grid is rotated by rotation_angle about its centre.
struct ObstacleGrid {
  int rows = 4;
  int cols = 4;
  double cell_size = 1.0;
  double radius = 0.25;
  Vec2 origin = Vec2::Zero();
  double rotation_angle = 0.0;

  Vec2 center() const;
  /// Maps a point given in unrotated grid coordinates to physical space.
  Vec2 to_physical(const Vec2& p) const;
  /// Inverse of to_physical.
  Vec2 to_grid(const Vec2& x) const;
  Vec2 obstacle_center(int row, int col) const;
  std::vector<Disk> obstacles() const;
  /// Counterclockwise outline of the grid footprint.
  std::vector<Vec2> outline() const;
  /// Throws MeshError when an obstacle meets its cell boundary or the grid
  /// leaves `outer`.
  void validate(const Rectangle& outer) const;
};

struct SideTags {
  BoundaryTag left = BoundaryTag::Inlet;
  BoundaryTag right = BoundaryTag::Outlet;
  BoundaryTag bottom = BoundaryTag::SlipWall;
  BoundaryTag top = BoundaryTag::SlipWall;
};

/// Element size next to obstacles and its growth rate away from them.
struct MeshSizing {
  double target_h = 0.1;
  /// Edge length on obstacle circles; <= 0 selects max(16, ceil(2 pi r / h)) segments.
  double near_h = 0.0;
  double grading = 0.3;
};

/// Structured P1 grid of right triangles, tagged by side.
Mesh generate_rectangle_mesh(double width, double height, double target_h, const SideTags& tags = {});

Mesh generate_perforated_mesh(const Rectangle& outer, const ObstacleGrid& grid, const MeshSizing& sizing,
                              const SideTags& tags = {});
inline Mesh generate_perforated_mesh(const Rectangle& outer, const ObstacleGrid& grid, double target_h,
                                     const SideTags& tags = {}) {
  return generate_perforated_mesh(outer, grid, MeshSizing{target_h}, tags);
}

/// Outer rectangle with the grid footprint meshed as a DARCY block; block
/// edges inside the domain are tagged INTERFACE.
Mesh generate_homogenized_mesh(const Rectangle& outer, const ObstacleGrid& block, double target_h,
                               const SideTags& tags = {});

/// Unit cell minus a centred disk; left/bottom are periodic masters.
Mesh generate_rve_mesh(double xi, double target_h);

/// Porous unit cell (y in [0, 1]) below free_cells empty cells, interface at y = 1.
Mesh generate_boundary_layer_mesh(double xi, int free_cells, double target_h);

/// Number of circle segments used for a disk of radius r at edge length h.
int circle_segments(double r, double h);

}  // namespace rebarflow::mesh
