#include "rebarflow/mesh/mesh_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace rebarflow::mesh {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T expect(std::istream& in, const char* what) {
  T value;
  if (!(in >> value)) throw MeshError(std::string("mesh file: expected ") + what);
  return value;
}

void expect_word(std::istream& in, const std::string& word) {
  if (expect<std::string>(in, word.c_str()) != word) throw MeshError("mesh file: expected '" + word + "'");
}

}  // namespace

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "nodes " << mesh.nodes.size() << " triangles " << mesh.triangles.size() << " edges " << mesh.edges.size()
      << '\n';
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    out << i << ' ' << fmt(mesh.nodes[i].x()) << ' ' << fmt(mesh.nodes[i].y()) << '\n';
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    out << t;
    for (int n : mesh.triangles[t].nodes) out << ' ' << n;
    out << ' ' << to_string(mesh.triangles[t].region) << '\n';
  }
  for (std::size_t e = 0; e < mesh.edges.size(); ++e)
    out << e << ' ' << mesh.edges[e].a << ' ' << mesh.edges[e].b << ' ' << to_string(mesh.edges[e].tag) << '\n';
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path);
  write_mesh(out, mesh);
}

Mesh read_mesh(std::istream& in) {
  Mesh mesh;
  expect_word(in, "nodes");
  const auto n = expect<long>(in, "node count");
  expect_word(in, "triangles");
  const auto t = expect<long>(in, "triangle count");
  expect_word(in, "edges");
  const auto e = expect<long>(in, "edge count");
  if (n < 0 || t < 0 || e < 0) throw MeshError("mesh file: negative count");

  mesh.nodes.resize(n);
  for (long i = 0; i < n; ++i) {
    if (expect<long>(in, "node id") != i) throw MeshError("mesh file: node ids out of order");
    const double x = expect<double>(in, "x");
    const double y = expect<double>(in, "y");
    mesh.nodes[i] = Vec2(x, y);
  }
  mesh.triangles.resize(t);
  int max_vertex = -1;
  for (long k = 0; k < t; ++k) {
    if (expect<long>(in, "triangle id") != k) throw MeshError("mesh file: triangle ids out of order");
    auto& tri = mesh.triangles[k];
    for (int& v : tri.nodes) {
      v = expect<int>(in, "triangle node");
      if (v < -1 || v >= n) throw MeshError("mesh file: triangle node out of range");
    }
    for (int j = 0; j < 3; ++j) {
      if (tri.nodes[j] < 0) throw MeshError("mesh file: missing triangle vertex");
      max_vertex = std::max(max_vertex, tri.nodes[j]);
    }
    tri.region = parse_region(expect<std::string>(in, "region"));
  }
  mesh.edges.resize(e);
  for (long k = 0; k < e; ++k) {
    if (expect<long>(in, "edge id") != k) throw MeshError("mesh file: edge ids out of order");
    auto& edge = mesh.edges[k];
    edge.a = expect<int>(in, "edge node");
    edge.b = expect<int>(in, "edge node");
    if (edge.a < 0 || edge.a >= n || edge.b < 0 || edge.b >= n) throw MeshError("mesh file: edge node out of range");
    edge.tag = parse_boundary_tag(expect<std::string>(in, "tag"));
  }
  mesh.num_vertices = max_vertex + 1;
  if (mesh.is_p2()) {
    // Boundary edge midpoints are recovered from the triangles.
    std::map<std::pair<int, int>, int> mid;
    constexpr int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    for (const auto& tri : mesh.triangles)
      for (int k = 0; k < 3; ++k) {
        const int a = tri.nodes[pairs[k][0]], b = tri.nodes[pairs[k][1]];
        mid[{std::min(a, b), std::max(a, b)}] = tri.nodes[3 + k];
      }
    for (auto& edge : mesh.edges) {
      auto it = mid.find({std::min(edge.a, edge.b), std::max(edge.a, edge.b)});
      if (it != mid.end()) edge.mid = it->second;
    }
  }
  return mesh;
}

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path);
  return read_mesh(in);
}

}  // namespace rebarflow::mesh
