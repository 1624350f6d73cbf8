#include "rebarflow/post/fields.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rebarflow/fem/reference_element.hpp"

namespace rebarflow::post {

namespace {

constexpr int kEdge[3][2] = {{0, 1}, {1, 2}, {2, 0}};

// Midpoint pressures from the vertex values.
void fill_midpoints(const mesh::Mesh& m, std::vector<double>& p, const std::vector<char>& mask) {
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      const int mid = t.nodes[3 + e];
      if (mid < 0 || !mask[mid]) continue;
      p[mid] = 0.5 * (p[t.nodes[kEdge[e][0]]] + p[t.nodes[kEdge[e][1]]]);
    }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<FieldRow> rows_of(const FieldSet& f, bool darcy) {
  std::vector<FieldRow> rows;
  if (!f.mesh) return rows;
  const auto& mask = darcy ? f.has_darcy : f.has_stokes;
  const auto& u = darcy ? f.seepage : f.velocity;
  const auto& p = darcy ? f.darcy_pressure : f.pressure;
  for (int i = 0; i < f.mesh->num_nodes(); ++i) {
    if (!mask[i]) continue;
    const Vec2& x = f.mesh->nodes[i];
    rows.push_back({i, x.x(), x.y(), u[i].x(), u[i].y(), p[i]});
  }
  return rows;
}

}  // namespace

bool FieldSet::any_darcy() const {
  for (char c : has_darcy)
    if (c) return true;
  return false;
}

FieldSet fields_from(const macro::SolveReport& report) {
  FieldSet f;
  f.mesh = report.mesh;
  const auto& m = *report.mesh;
  const auto& d = *report.dofs;
  const int n = m.num_nodes();
  f.has_stokes.assign(n, 0);
  f.has_darcy.assign(n, 0);
  f.velocity.assign(n, Vec2::Zero());
  f.seepage.assign(n, Vec2::Zero());
  f.pressure.assign(n, 0.0);
  f.darcy_pressure.assign(n, 0.0);
  const auto& x = report.raw;
  for (int i = 0; i < n; ++i) {
    if (d.has_stokes(i)) {
      f.has_stokes[i] = 1;
      f.velocity[i] = Vec2(x[d.velocity(i, 0)], x[d.velocity(i, 1)]);
      if (i < m.num_vertices) f.pressure[i] = x[d.pressure(i)];
    }
    if (d.has_darcy(i)) {
      f.has_darcy[i] = 1;
      f.seepage[i] = Vec2(x[d.darcy_velocity(i, 0)], x[d.darcy_velocity(i, 1)]);
      if (i < m.num_vertices) f.darcy_pressure[i] = x[d.darcy_pressure(i)];
    }
  }
  fill_midpoints(m, f.pressure, f.has_stokes);
  fill_midpoints(m, f.darcy_pressure, f.has_darcy);
  return f;
}

std::vector<FieldRow> stokes_rows(const FieldSet& f) { return rows_of(f, false); }
std::vector<FieldRow> darcy_rows(const FieldSet& f) { return rows_of(f, true); }

void write_fields_csv(const std::string& path, const std::vector<FieldRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "id,x,y,u_x,u_y,p\n";
  for (const auto& r : rows)
    out << r.id << ',' << fmt(r.x) << ',' << fmt(r.y) << ',' << fmt(r.ux) << ',' << fmt(r.uy) << ',' << fmt(r.p)
        << '\n';
  if (!out) throw Error("write failed for " + path);
}

std::vector<FieldRow> read_fields_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "id,x,y,u_x,u_y,p") throw Error(path + ": unexpected header");
  std::vector<FieldRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream s(line);
    FieldRow r;
    if (!(s >> r.id >> r.x >> r.y >> r.ux >> r.uy >> r.p))
      throw Error(path + ":" + std::to_string(lineno) + ": malformed row");
    rows.push_back(r);
  }
  return rows;
}

FieldSet assemble_fields(std::shared_ptr<const mesh::Mesh> mesh, const std::vector<FieldRow>& stokes,
                         const std::vector<FieldRow>& darcy) {
  FieldSet f;
  const int n = mesh->num_nodes();
  f.mesh = std::move(mesh);
  f.has_stokes.assign(n, 0);
  f.has_darcy.assign(n, 0);
  f.velocity.assign(n, Vec2::Zero());
  f.seepage.assign(n, Vec2::Zero());
  f.pressure.assign(n, 0.0);
  f.darcy_pressure.assign(n, 0.0);
  auto put = [n](const std::vector<FieldRow>& rows, std::vector<char>& mask, std::vector<Vec2>& u,
                 std::vector<double>& p) {
    for (const auto& r : rows) {
      if (r.id < 0 || r.id >= n) throw Error("field row for unknown node " + std::to_string(r.id));
      mask[r.id] = 1;
      u[r.id] = Vec2(r.ux, r.uy);
      p[r.id] = r.p;
    }
  };
  put(stokes, f.has_stokes, f.velocity, f.pressure);
  put(darcy, f.has_darcy, f.seepage, f.darcy_pressure);
  return f;
}

FieldSampler::FieldSampler(const FieldSet& fields) : fields_(&fields), locator_(*fields.mesh) {
  const auto& m = *fields.mesh;
  lo_ = hi_ = m.nodes.front();
  for (int i = 0; i < m.num_vertices; ++i) {
    lo_ = lo_.cwiseMin(m.nodes[i]);
    hi_ = hi_.cwiseMax(m.nodes[i]);
  }
}

std::optional<FieldSampler::Value> FieldSampler::at(const Vec2& x) const {
  const auto loc = locator_.locate(x);
  if (!loc) return std::nullopt;
  const auto& f = *fields_;
  const auto& t = f.mesh->triangles[loc->triangle];
  Value v;
  v.triangle = loc->triangle;
  v.darcy = t.region == mesh::Region::Darcy;
  const auto& u = v.darcy ? f.seepage : f.velocity;
  const auto& p = v.darcy ? f.darcy_pressure : f.pressure;
  const auto n = fem::p2_values(loc->bary);
  for (int i = 0; i < 6; ++i) v.velocity += n[i] * u[t.nodes[i]];
  for (int k = 0; k < 3; ++k) v.pressure += loc->bary[k] * p[t.nodes[k]];
  return v;
}

}  // namespace rebarflow::post
