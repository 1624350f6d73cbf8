#include "rebarflow/post/export.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace rebarflow::post {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_vtk(std::ostream& out, const FieldSet& f, const std::string& title) {
  const auto& m = *f.mesh;
  const int n = m.num_nodes(), nt = m.num_triangles();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n << " double\n";
  for (const auto& x : m.nodes) out << fmt(x.x()) << ' ' << fmt(x.y()) << " 0\n";
  out << "CELLS " << nt << ' ' << 7 * nt << '\n';
  for (const auto& t : m.triangles) {
    out << 6;
    for (int k : t.nodes) out << ' ' << k;
    out << '\n';
  }
  out << "CELL_TYPES " << nt << '\n';
  for (int t = 0; t < nt; ++t) out << "22\n";
  out << "CELL_DATA " << nt << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (const auto& t : m.triangles) out << (t.region == mesh::Region::Darcy ? 1 : 0) << '\n';
  out << "POINT_DATA " << n << "\nVECTORS velocity double\n";
  for (int i = 0; i < n; ++i) {
    const Vec2 u = f.has_stokes[i] ? f.velocity[i] : (f.has_darcy[i] ? f.seepage[i] : Vec2::Zero());
    out << fmt(u.x()) << ' ' << fmt(u.y()) << " 0\n";
  }
  out << "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < n; ++i) out << fmt(f.has_stokes[i] ? f.pressure[i] : (f.has_darcy[i] ? f.darcy_pressure[i] : 0.0)) << '\n';
}

void write_vtk(const std::string& path, const FieldSet& fields) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  write_vtk(out, fields);
  if (!out) throw Error("write failed for " + path);
}

}  // namespace rebarflow::post
