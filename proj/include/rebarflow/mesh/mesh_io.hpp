#pragma once

#include <iosfwd>
#include <string>

#include "rebarflow/mesh/mesh.hpp"

namespace rebarflow::mesh {

/// Plain-text mesh:
///   nodes N triangles T edges E
///   id x y                      (N lines)
///   id n1 n2 n3 n4 n5 n6 region (T lines, -1 for absent midpoints)
///   id a b tag                  (E lines)
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh(const std::string& path, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
Mesh read_mesh(const std::string& path);

}  // namespace rebarflow::mesh
