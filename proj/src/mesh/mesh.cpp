#include "rebarflow/mesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace rebarflow::mesh {

namespace {

constexpr std::array<std::pair<int, int>, 3> kEdgeVertices{{{0, 1}, {1, 2}, {2, 0}}};

long long edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b);
}

const std::array<std::pair<BoundaryTag, const char*>, 9> kTagNames{{
    {BoundaryTag::Inlet, "INLET"},
    {BoundaryTag::Outlet, "OUTLET"},
    {BoundaryTag::SlipWall, "SLIP_WALL"},
    {BoundaryTag::Obstacle, "OBSTACLE"},
    {BoundaryTag::Interface, "INTERFACE"},
    {BoundaryTag::PeriodicMaster, "PERIODIC_MASTER"},
    {BoundaryTag::PeriodicSlave, "PERIODIC_SLAVE"},
    {BoundaryTag::BlTop, "BL_TOP"},
    {BoundaryTag::BlBottom, "BL_BOTTOM"},
}};

const std::array<std::pair<Region, const char*>, 3> kRegionNames{{
    {Region::Fluid, "FLUID"},
    {Region::Darcy, "DARCY"},
    {Region::RveFluid, "RVE_FLUID"},
}};

}  // namespace

std::string to_string(BoundaryTag tag) {
  for (const auto& [t, name] : kTagNames)
    if (t == tag) return name;
  return "UNKNOWN";
}

std::string to_string(Region region) {
  for (const auto& [r, name] : kRegionNames)
    if (r == region) return name;
  return "UNKNOWN";
}

BoundaryTag parse_boundary_tag(const std::string& name) {
  for (const auto& [t, n] : kTagNames)
    if (name == n) return t;
  throw MeshError("unknown boundary tag '" + name + "'");
}

Region parse_region(const std::string& name) {
  for (const auto& [r, n] : kRegionNames)
    if (name == n) return r;
  throw MeshError("unknown region '" + name + "'");
}

double Mesh::signed_area(int t) const {
  const auto& n = triangles[t].nodes;
  const Vec2 e1 = nodes[n[1]] - nodes[n[0]];
  const Vec2 e2 = nodes[n[2]] - nodes[n[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double Mesh::area(std::optional<Region> region) const {
  double sum = 0.0;
  for (int t = 0; t < num_triangles(); ++t)
    if (!region || triangles[t].region == *region) sum += signed_area(t);
  return sum;
}

double Mesh::max_edge_length() const {
  double h = 0.0;
  for (const auto& tri : triangles)
    for (auto [i, j] : kEdgeVertices) h = std::max(h, (nodes[tri.nodes[i]] - nodes[tri.nodes[j]]).norm());
  return h;
}

std::vector<int> Mesh::periodic_partner_map() const {
  std::vector<int> partner(nodes.size(), -1);
  for (const auto& p : periodic) {
    partner[p.slave] = p.master;
    if (partner[p.master] < 0) partner[p.master] = p.slave;
  }
  return partner;
}

void Mesh::validate() const {
  for (int t = 0; t < num_triangles(); ++t) {
    if (!(signed_area(t) > 0.0)) throw MeshError("triangle " + std::to_string(t) + " has non-positive area");
    const auto& n = triangles[t].nodes;
    if (n[3] < 0) continue;
    for (int k = 0; k < 3; ++k) {
      const auto [i, j] = kEdgeVertices[k];
      const Vec2 mid = 0.5 * (nodes[n[i]] + nodes[n[j]]);
      const double scale = std::max(1.0, mid.norm());
      if ((nodes[n[3 + k]] - mid).norm() > 1e-12 * scale)
        throw MeshError("midpoint node of triangle " + std::to_string(t) + " is off its edge");
    }
  }
  for (const auto& d : obstacles)
    for (int v = 0; v < num_vertices; ++v)
      if ((nodes[v] - d.center).norm() < d.radius - 1e-10)
        throw MeshError("vertex " + std::to_string(v) + " lies inside an obstacle");
  // Boundary loops: every vertex touches an even number of outer boundary edges.
  std::vector<int> degree(nodes.size(), 0);
  for (const auto& e : edges) {
    if (e.tag == BoundaryTag::Interface) continue;
    ++degree[e.a];
    ++degree[e.b];
  }
  for (std::size_t v = 0; v < degree.size(); ++v)
    if (degree[v] % 2 != 0) throw MeshError("boundary edges do not form closed loops at node " + std::to_string(v));
}

Mesh enrich_p2(const Mesh& mesh) {
  if (mesh.is_p2()) return mesh;
  Mesh out = mesh;
  out.nodes.resize(mesh.num_vertices);
  out.num_vertices = mesh.num_vertices;

  std::unordered_map<long long, int> mid_of;
  mid_of.reserve(mesh.triangles.size() * 2);
  for (auto& tri : out.triangles) {
    for (int k = 0; k < 3; ++k) {
      const auto [i, j] = kEdgeVertices[k];
      const int a = tri.nodes[i], b = tri.nodes[j];
      auto [it, inserted] = mid_of.try_emplace(edge_key(a, b), static_cast<int>(out.nodes.size()));
      if (inserted) {
        const Vec2 mid = 0.5 * (out.nodes[a] + out.nodes[b]);
        out.nodes.push_back(mid);
      }
      tri.nodes[3 + k] = it->second;
    }
  }
  for (auto& e : out.edges) {
    auto it = mid_of.find(edge_key(e.a, e.b));
    if (it == mid_of.end()) throw MeshError("boundary edge is not an edge of any triangle");
    e.mid = it->second;
  }

  // Midpoints of paired periodic edges are paired as well.
  std::multimap<int, std::pair<int, Vec2>> master_of;
  for (const auto& p : mesh.periodic) master_of.emplace(p.slave, std::make_pair(p.master, p.shift));
  for (const auto& e : out.edges) {
    if (e.tag != BoundaryTag::PeriodicSlave) continue;
    auto [a0, a1] = master_of.equal_range(e.a);
    auto [b0, b1] = master_of.equal_range(e.b);
    for (auto ia = a0; ia != a1; ++ia) {
      for (auto ib = b0; ib != b1; ++ib) {
        if ((ia->second.second - ib->second.second).norm() > 1e-12) continue;
        auto im = mid_of.find(edge_key(ia->second.first, ib->second.first));
        if (im != mid_of.end()) out.periodic.push_back({im->second, e.mid, ia->second.second});
      }
    }
  }
  return out;
}

}  // namespace rebarflow::mesh
