#include "rebarflow/post/runner.hpp"

#include <filesystem>
#include <fstream>

#include "rebarflow/fem/assembly.hpp"
#include "rebarflow/macro/solvers.hpp"
#include "rebarflow/mesh/mesh_io.hpp"
#include "rebarflow/post/export.hpp"

namespace rebarflow::post {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

FieldSet cell_fields(const micro::RveProblem& rve, const micro::CellSolution& s) {
  const auto& m = rve.mesh();
  const auto& d = rve.dofs();
  std::vector<FieldRow> rows;
  for (int i = 0; i < m.num_nodes(); ++i) {
    FieldRow r{i, m.nodes[i].x(), m.nodes[i].y(), s.raw[d.velocity(i, 0)], s.raw[d.velocity(i, 1)], 0.0};
    rows.push_back(r);
  }
  constexpr int kEdge[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      rows[t.nodes[kEdge[e][0]]].p = s.raw[d.pressure(t.nodes[kEdge[e][0]])];
      if (t.nodes[3 + e] >= 0)
        rows[t.nodes[3 + e]].p =
            0.5 * (s.raw[d.pressure(t.nodes[kEdge[e][0]])] + s.raw[d.pressure(t.nodes[kEdge[e][1]])]);
    }
  // Non-owning handle; the field set must not outlive the cell problem.
  std::shared_ptr<const mesh::Mesh> mesh(std::shared_ptr<const mesh::Mesh>{}, &m);
  return assemble_fields(mesh, rows, {});
}

void dump_cell_solutions(const macro::SolveReport& report, const std::string& directory) {
  if (!report.law) throw ConfigError("--dump-rve needs a homogenized run");
  const fs::path dir(directory);
  fs::create_directories(dir);
  const auto& rve = report.law->rve();
  mesh::write_mesh((dir / "mesh.txt").string(), rve.mesh());
  const auto& m = *report.mesh;
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.triangles[t].region != mesh::Region::Darcy) continue;
    const Vec2 g = fem::darcy_gradient(*report.dofs, t, report.raw);
    const auto s = report.law->cell_solution(t, g, report.body_force);
    write_fields_csv((dir / ("cell_" + std::to_string(t) + ".csv")).string(), stokes_rows(cell_fields(rve, s)));
  }
}

RunOutcome run_scenario(RunConfig c, const RunOptions& opt) {
  if (opt.threads) {
    if (*opt.threads < 1) throw ConfigError("threads must be at least 1");
    c.scenario.solver.threads = *opt.threads;
  }
  if (!opt.output_directory.empty()) c.output.directory = opt.output_directory;
  RunOutcome out;
  out.report = macro::solve(c.scenario);
  const fs::path dir(c.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  out.directory = dir.string();

  // Geometry is fixed by the scenario; the thread count is not part of it.
  RunConfig canonical = c;
  canonical.scenario.solver.threads = 1;
  write_text(dir / "scenario.ini", format_config(canonical));
  mesh::write_mesh((dir / "mesh.txt").string(), *out.report.mesh);
  const FieldSet fields = fields_from(out.report);
  write_fields_csv((dir / "fields.csv").string(), stokes_rows(fields));
  if (fields.any_darcy()) write_fields_csv((dir / "darcy_fields.csv").string(), darcy_rows(fields));
  write_text(dir / "report.txt", out.report.format(false));
  if (c.output.vtk) write_vtk((dir / "fields.vtk").string(), fields);

  if (!c.output.profiles.empty()) {
    const FieldSampler sampler(fields);
    std::optional<PressureReconstruction> rec;
    if (out.report.mode == macro::Mode::Homogenized) rec.emplace(out.report, c.scenario.grid);
    for (const auto& req : c.output.profiles)
      write_profile_csv((dir / ("profile_" + req.name + ".csv")).string(),
                        extract_profile(sampler, req, rec ? &*rec : nullptr));
  }
  if (!opt.dump_rve.empty()) dump_cell_solutions(out.report, opt.dump_rve);
  return out;
}

RunOutcome run_scenario(const std::string& path, const RunOptions& opt) { return run_scenario(load_config(path), opt); }

int exit_code(const std::exception& e) {
  if (dynamic_cast<const MeshError*>(&e)) return 2;
  if (dynamic_cast<const SolverError*>(&e)) return 3;
  return 1;
}

}  // namespace rebarflow::post
