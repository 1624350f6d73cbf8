#include "rebarflow/post/profile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "rebarflow/fem/assembly.hpp"

namespace rebarflow::post {

namespace {

const std::pair<ProfileField, const char*> kNames[] = {
    {ProfileField::VelocityX, "u_x"},
    {ProfileField::VelocityY, "u_y"},
    {ProfileField::Pressure, "p"},
    {ProfileField::AveragedPressure, "pbar"},
    {ProfileField::ReconstructedPressure, "p_reconstructed"},
};

bool inside_box(const Vec2& x, const Vec2& lo, const Vec2& hi) {
  const double tol = 1e-9 * std::max(1.0, (hi - lo).norm());
  return x.x() >= lo.x() - tol && x.x() <= hi.x() + tol && x.y() >= lo.y() - tol && x.y() <= hi.y() + tol;
}

}  // namespace

std::string to_string(ProfileField f) {
  for (const auto& [k, n] : kNames)
    if (k == f) return n;
  return "unknown";
}

ProfileField parse_profile_field(const std::string& name) {
  for (const auto& [k, n] : kNames)
    if (name == n) return k;
  throw ConfigError("unknown profile field '" + name + "'");
}

std::vector<ProfilePoint> extract_profile(const FieldSampler& fields, const ProfileRequest& req,
                                          PressureReconstruction* reconstruction) {
  if (req.samples < 2) throw ConfigError("profile '" + req.name + "' needs at least 2 samples");
  if (!inside_box(req.a, fields.lower(), fields.upper()) || !inside_box(req.b, fields.lower(), fields.upper()))
    throw ConfigError("profile '" + req.name + "' leaves the domain");
  if (req.field == ProfileField::ReconstructedPressure && !reconstruction)
    throw ConfigError("profile '" + req.name + "' needs a homogenized solution");
  std::vector<ProfilePoint> out;
  out.reserve(req.samples);
  const double len = (req.b - req.a).norm();
  for (int i = 0; i < req.samples; ++i) {
    const double t = static_cast<double>(i) / (req.samples - 1);
    ProfilePoint pt;
    pt.s = t * len;
    pt.x = req.a + t * (req.b - req.a);
    const auto v = fields.at(pt.x);
    if (v) {
      switch (req.field) {
        case ProfileField::VelocityX: pt.value = v->velocity.x(); break;
        case ProfileField::VelocityY: pt.value = v->velocity.y(); break;
        case ProfileField::Pressure: pt.value = v->pressure; break;
        case ProfileField::AveragedPressure:
          if (v->darcy) pt.value = v->pressure;
          break;
        case ProfileField::ReconstructedPressure:
          pt.value = v->darcy ? reconstruction->at(pt.x) : std::optional<double>(v->pressure);
          break;
      }
    }
    out.push_back(pt);
  }
  return out;
}

void write_profile_csv(const std::string& path, const std::vector<ProfilePoint>& profile) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error("cannot write " + path);
  std::fprintf(f, "s,x,y,value\n");
  for (const auto& p : profile) {
    if (p.value)
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", p.s, p.x.x(), p.x.y(), *p.value);
    else
      std::fprintf(f, "%.17g,%.17g,%.17g,nan\n", p.s, p.x.x(), p.x.y());
  }
  if (std::fclose(f) != 0) throw Error("write failed for " + path);
}

PressureReconstruction::PressureReconstruction(const macro::SolveReport& report, const mesh::ObstacleGrid& grid)
    : report_(&report), grid_(grid), locator_(*report.mesh) {
  if (report.mode != macro::Mode::Homogenized || !report.law)
    throw ConfigError("pressure reconstruction needs a homogenized solution");
}

Vec2 PressureReconstruction::cell_coordinate(const Vec2& x) const { return grid_.to_grid(x) - grid_.origin; }

std::optional<mesh::Location> PressureReconstruction::locate_darcy(const Vec2& x) const {
  auto loc = locator_.locate(x);
  if (!loc || report_->mesh->triangles[loc->triangle].region != mesh::Region::Darcy) return std::nullopt;
  return loc;
}

std::optional<double> PressureReconstruction::affine_part(const Vec2& x) const {
  const auto loc = locate_darcy(x);
  if (!loc) return std::nullopt;
  const auto& m = *report_->mesh;
  const auto& d = *report_->dofs;
  const auto& t = m.triangles[loc->triangle];
  Vec2 xc = Vec2::Zero();
  double pc = 0.0;
  for (int k = 0; k < 3; ++k) {
    xc += m.nodes[t.nodes[k]] / 3.0;
    pc += report_->raw[d.darcy_pressure(t.nodes[k])] / 3.0;
  }
  const Vec2 g = fem::darcy_gradient(d, loc->triangle, report_->raw);
  return pc + g.dot(x - xc);
}

std::optional<double> PressureReconstruction::at(const Vec2& x) {
  const auto loc = locate_darcy(x);
  if (!loc) return std::nullopt;
  auto it = cells_.find(loc->triangle);
  if (it == cells_.end()) {
    const Vec2 g = fem::darcy_gradient(*report_->dofs, loc->triangle, report_->raw);
    auto s = std::make_shared<const micro::CellSolution>(
        report_->law->cell_solution(loc->triangle, g, report_->body_force));
    it = cells_.emplace(loc->triangle, std::move(s)).first;
  }
  const auto ps = report_->law->rve().pressure_at(*it->second, cell_coordinate(x));
  if (!ps) return std::nullopt;
  return *affine_part(x) + *ps;
}

}  // namespace rebarflow::post
