#include "rebarflow/post/compare.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "rebarflow/macro/solvers.hpp"
#include "rebarflow/mesh/mesh_io.hpp"

namespace rebarflow::post {

namespace fs = std::filesystem;

RunData load_run(const std::string& directory) {
  const fs::path dir(directory);
  if (!fs::is_directory(dir)) throw ConfigError("no such run directory " + directory);
  RunData r;
  r.config = load_config((dir / "scenario.ini").string());
  auto m = std::make_shared<const mesh::Mesh>(mesh::read_mesh((dir / "mesh.txt").string()));
  const auto stokes = read_fields_csv((dir / "fields.csv").string());
  std::vector<FieldRow> darcy;
  if (fs::exists(dir / "darcy_fields.csv")) darcy = read_fields_csv((dir / "darcy_fields.csv").string());
  r.fields = assemble_fields(std::move(m), stokes, darcy);
  return r;
}

std::vector<Section> read_sections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sections file " + path);
  std::vector<Section> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream s(line);
    Section sec;
    if (!(s >> sec.name)) continue;
    if (!(s >> sec.a.x() >> sec.a.y() >> sec.b.x() >> sec.b.y()))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'name x0 y0 x1 y1 [samples]'");
    if (!(s >> std::ws).eof() && !(s >> sec.samples))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": bad sample count");
    if (sec.samples < 2) throw ConfigError(path + ":" + std::to_string(lineno) + ": at least 2 samples");
    out.push_back(sec);
  }
  return out;
}

std::vector<Section> default_sections(const macro::Scenario& s) {
  const auto& g = s.grid;
  const double yc = g.center().y();
  const double xc = g.obstacle_center(0, std::min(2, g.cols - 1)).x();
  return {{"horizontal", {s.outer.x0, yc}, {s.outer.x0 + s.outer.width, yc}, 400},
          {"vertical", {xc, s.outer.y0}, {xc, s.outer.y0 + s.outer.height}, 400}};
}

std::string Metrics::format() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "velocity_error %.6e\ngradient_error %.6e\nslope_reference %.10g\nslope_test %.10g\n",
                velocity_error, gradient_error, reference_slope, test_slope);
  out += line;
  for (const auto& [name, e] : pressure_errors) {
    std::snprintf(line, sizeof line, "pressure_error[%s] %.6e\n", name.c_str(), e);
    out += line;
  }
  std::snprintf(line, sizeof line, "pressure_error %.6e\npressure_field_error %.6e\n", pressure_error,
                pressure_field_error);
  return out + line;
}

void check_same_geometry(const macro::Scenario& a, const macro::Scenario& b) {
  auto same = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); };
  const auto &ga = a.grid, &gb = b.grid;
  const bool ok = same(a.outer.x0, b.outer.x0) && same(a.outer.y0, b.outer.y0) &&
                  same(a.outer.width, b.outer.width) && same(a.outer.height, b.outer.height) && ga.rows == gb.rows &&
                  ga.cols == gb.cols && same(ga.cell_size, gb.cell_size) && same(ga.radius, gb.radius) &&
                  same(ga.origin.x(), gb.origin.x()) && same(ga.origin.y(), gb.origin.y()) &&
                  same(ga.rotation_angle, gb.rotation_angle);
  if (!ok) throw ConfigError("runs do not share the same geometry");
}

std::vector<Vec2> footprint_averages(const FieldSampler& f, const mesh::ObstacleGrid& grid, int n) {
  std::vector<Vec2> out;
  const double l = grid.cell_size;
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      Vec2 sum = Vec2::Zero();
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const Vec2 y = grid.origin + l * Vec2(c + (i + 0.5) / n, r + (j + 0.5) / n);
          if (const auto v = f.at(grid.to_physical(y))) sum += v->velocity;
        }
      out.push_back(sum / (static_cast<double>(n) * n));
    }
  return out;
}

double midline_slope(const FieldSampler& f, const mesh::ObstacleGrid& grid, int n) {
  const double w = grid.cols * grid.cell_size;
  const double ym = grid.origin.y() + 0.5 * grid.rows * grid.cell_size;
  double st = 0, sp = 0, stt = 0, stp = 0;
  int k = 0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n * w;
    const auto v = f.at(grid.to_physical(Vec2(grid.origin.x() + t, ym)));
    if (!v) continue;
    st += t;
    sp += v->pressure;
    stt += t * t;
    stp += t * v->pressure;
    ++k;
  }
  if (k < 2) throw SolverError("midline has fewer than two fluid samples");
  return (k * stp - st * sp) / (k * stt - st * st);
}

double pressure_field_error(const FieldSet& ref, const FieldSampler& test) {
  const auto& m = *ref.mesh;
  double d = 0.0, sc = 0.0;
  for (int v = 0; v < m.num_vertices; ++v) {
    if (!ref.has_stokes[v] && !ref.has_darcy[v]) continue;
    const double p = ref.has_stokes[v] ? ref.pressure[v] : ref.darcy_pressure[v];
    const auto t = test.at(m.nodes[v]);
    if (!t) continue;
    d = std::max(d, std::abs(p - t->pressure));
    sc = std::max(sc, std::abs(p));
  }
  return d == 0.0 ? 0.0 : d / sc;
}

Metrics compare(const RunData& ref, const RunData& test, std::span<const Section> sections,
                const CompareOptions& opt) {
  const auto& s = ref.config.scenario;
  check_same_geometry(s, test.config.scenario);
  const FieldSampler a(ref.fields), b(test.fields);
  Metrics m;

  const auto ua = footprint_averages(a, s.grid, opt.footprint_samples);
  const auto ub = footprint_averages(b, s.grid, opt.footprint_samples);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < ua.size(); ++i) {
    diff = std::max(diff, (ua[i] - ub[i]).norm());
    scale = std::max(scale, ua[i].norm());
  }
  m.velocity_error = diff == 0.0 ? 0.0 : diff / scale;
  m.pressure_field_error = pressure_field_error(ref.fields, b);

  m.reference_slope = midline_slope(a, s.grid, opt.midline_samples);
  m.test_slope = midline_slope(b, s.grid, opt.midline_samples);
  const double ds = std::abs(m.reference_slope - m.test_slope);
  m.gradient_error = ds == 0.0 ? 0.0 : ds / std::abs(m.reference_slope);

  for (const auto& sec : sections) {
    const ProfileRequest req{sec.name, sec.a, sec.b, ProfileField::Pressure, sec.samples};
    const auto pa = extract_profile(a, req), pb = extract_profile(b, req);
    double d = 0.0, sc = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      if (!pa[i].value || !pb[i].value) continue;
      d = std::max(d, std::abs(*pa[i].value - *pb[i].value));
      sc = std::max(sc, std::abs(*pa[i].value));
    }
    const double e = d == 0.0 ? 0.0 : d / sc;
    m.pressure_errors.emplace_back(sec.name, e);
    m.pressure_error = std::max(m.pressure_error, e);
  }
  return m;
}

double interface_mismatch(const FieldSampler& ref, const FieldSampler& test, const mesh::ObstacleGrid& grid,
                          const SweepOptions& opt) {
  const double l = grid.cell_size;
  const double band = opt.band_cells * l;
  const double x = grid.origin.x() + (std::min(2, grid.cols - 1) + 0.5) * l;
  const double bottom = grid.origin.y(), top = bottom + grid.rows * l;
  const Vec2 tangent = grid.to_physical(Vec2(1.0, 0.0)) - grid.to_physical(Vec2::Zero());
  double worst = 0.0;
  for (const double y0 : {top, bottom - band})
    for (int i = 0; i < opt.samples; ++i) {
      const double y = y0 + (i + 0.5) / opt.samples * band;
      const Vec2 p = grid.to_physical(Vec2(x, y));
      const auto a = ref.at(p), b = test.at(p);
      if (!a || !b) continue;
      worst = std::max(worst, std::abs((a->velocity - b->velocity).dot(tangent)));
    }
  return worst;
}

std::size_t argmin(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  return best;
}

SweepResult beta_sweep(const macro::Scenario& scenario, std::span<const double> betas, const SweepOptions& opt) {
  if (betas.empty()) throw ConfigError("beta list is empty");
  for (double b : betas)
    if (!(b >= 0.0)) throw ConfigError("beta values must be non-negative");
  macro::Scenario dns = scenario;
  dns.mode = macro::Mode::Dns;
  if (opt.dns_target_h > 0.0) dns.target_h = opt.dns_target_h;
  const auto ref_report = macro::solve_dns(dns);
  const FieldSet ref_fields = fields_from(ref_report);
  const FieldSampler ref(ref_fields);

  macro::Scenario hom = scenario;
  hom.mode = macro::Mode::Homogenized;
  hom.validate();
  const auto rve = macro::make_rve(hom);
  const auto macro_mesh = mesh::enrich_p2(mesh::generate_homogenized_mesh(hom.outer, hom.grid, hom.target_h, hom.sides));

  SweepResult r;
  for (double beta : betas) {
    const auto rep = macro::solve_coupled(hom, macro_mesh, rve, beta);
    const FieldSet f = fields_from(rep);
    r.betas.push_back(beta);
    r.mismatch.push_back(interface_mismatch(ref, FieldSampler(f), hom.grid, opt));
  }
  r.best = r.betas[argmin(r.mismatch)];
  return r;
}

}  // namespace rebarflow::post
