#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rebarflow/common.hpp"

namespace rebarflow::mesh {

enum class BoundaryTag {
  Inlet,
  Outlet,
  SlipWall,
  Obstacle,
  Interface,
  PeriodicMaster,
  PeriodicSlave,
  BlTop,
  BlBottom,
};

enum class Region { Fluid, Darcy, RveFluid };

std::string to_string(BoundaryTag tag);
std::string to_string(Region region);
BoundaryTag parse_boundary_tag(const std::string& name);
Region parse_region(const std::string& name);

/// Six-node triangle; entries 3..5 are the midpoints of edges (0,1), (1,2),
/// (2,0) and hold -1 on a P1 mesh.
struct Triangle {
  std::array<int, 6> nodes{-1, -1, -1, -1, -1, -1};
  Region region = Region::Fluid;
};

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  int mid = -1;
  BoundaryTag tag = BoundaryTag::SlipWall;
};

/// x(slave) = x(master) + shift
struct PeriodicPair {
  int master = -1;
  int slave = -1;
  Vec2 shift = Vec2::Zero();
};

struct Disk {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

class Mesh {
 public:
  /// Vertices occupy [0, num_vertices), edge midpoints follow.
  std::vector<Vec2> nodes;
  int num_vertices = 0;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> edges;
  std::vector<PeriodicPair> periodic;

  // Geometry the mesh was built from; kept for classification queries.
  std::vector<Disk> obstacles;
  std::vector<Vec2> darcy_block;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  bool is_p2() const { return !triangles.empty() && triangles.front().nodes[3] >= 0; }

  double signed_area(int t) const;
  /// Sum of triangle areas, optionally restricted to one region.
  double area(std::optional<Region> region = std::nullopt) const;
  double max_edge_length() const;

  /// Periodic partner of a node under the recorded pairs (both directions),
  /// -1 when unpaired.
  std::vector<int> periodic_partner_map() const;

  /// Throws MeshError if orientation, midpoint or obstacle invariants fail.
  void validate() const;
};

/// Adds a unique midpoint node per edge, including boundary-edge and
/// periodic-pair bookkeeping. Idempotent on P2 meshes.
Mesh enrich_p2(const Mesh& mesh);

}  // namespace rebarflow::mesh
