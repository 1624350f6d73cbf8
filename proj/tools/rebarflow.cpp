#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "rebarflow/macro/scenario.hpp"
#include "rebarflow/micro/boundary_layer.hpp"
#include "rebarflow/micro/rve_problem.hpp"
#include "rebarflow/post/compare.hpp"
#include "rebarflow/post/runner.hpp"

using namespace rebarflow;

namespace {

int cmd_run(const std::string& config, std::optional<int> threads, const std::string& output,
            const std::string& dump) {
  post::RunOptions opt{threads, output, dump};
  const auto out = post::run_scenario(config, opt);
  std::cout << out.report.format(true) << "# output " << out.directory << '\n';
  return 0;
}

int cmd_compare(const std::string& ref_dir, const std::string& test_dir, const std::string& sections, int samples) {
  const auto ref = post::load_run(ref_dir);
  const auto test = post::load_run(test_dir);
  const auto secs = sections.empty() ? post::default_sections(ref.config.scenario) : post::read_sections(sections);
  post::CompareOptions opt;
  opt.footprint_samples = samples;
  std::cout << post::compare(ref, test, secs, opt).format();
  return 0;
}

int cmd_sweep(const std::string& config, const std::vector<double>& betas, std::optional<int> threads,
              const post::SweepOptions& opt) {
  auto c = post::load_config(config);
  if (threads) c.scenario.solver.threads = *threads;
  const auto r = post::beta_sweep(c.scenario, betas, opt);
  for (std::size_t i = 0; i < r.betas.size(); ++i) std::printf("beta %g mismatch %.6e\n", r.betas[i], r.mismatch[i]);
  std::printf("best %g\n", r.best);
  return 0;
}

int cmd_rve(double xi, const std::string& law_name, double mu, double mu0, double tau0, double m, double h,
            int free_cells) {
  if (law_name != "bingham" && law_name != "newtonian") throw ConfigError("--law must be newtonian or bingham");
  const auto law = law_name == "bingham" ? constitutive::FluidLaw::bingham(mu0, tau0, m)
                                         : constitutive::FluidLaw::newtonian(mu);
  const micro::RveProblem rve(xi, law, h);
  const auto s = rve.solve_cell(Vec2::Zero(), Vec2::Zero());
  const Mat2 k = rve.tangent_permeability(s);
  std::printf("xi %.6g\nphi %.10g\nK %.10e %.10e\n  %.10e %.10e\n", xi, rve.porosity(), k(0, 0), k(0, 1), k(1, 0),
              k(1, 1));
  if (law.kind() == constitutive::LawKind::Newtonian) {
    micro::BoundaryLayerOptions bo;
    bo.free_cells = free_cells;
    bo.target_h = h;
    const auto bl = micro::solve_boundary_layer(xi, law, bo);
    std::printf("C_bl %.10g\nbeta %.10g\n", bl.c_bl, bl.beta);
  } else {
    std::printf("C_bl n/a (Newtonian only)\nbeta n/a\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stokes flow around reinforcing bars: resolved and homogenized solvers"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<int> threads;
  app.add_option("--threads", threads, "worker threads for cell solves")->check(CLI::PositiveNumber);

  std::string config, output, dump;
  auto* run = app.add_subcommand("run", "solve a scenario and write its outputs");
  run->add_option("config", config, "scenario file")->required();
  run->add_option("--output", output, "output directory (overrides the config)");
  run->add_option("--dump-rve", dump, "write cell solutions of a homogenized run");

  std::string ref_dir, test_dir, sections;
  int footprint = 200;
  auto* cmp = app.add_subcommand("compare", "compare two runs (reference first)");
  cmp->add_option("reference", ref_dir)->required();
  cmp->add_option("test", test_dir)->required();
  cmp->add_option("--sections", sections, "section file, 'name x0 y0 x1 y1 [samples]' per line");
  cmp->add_option("--footprint-samples", footprint, "samples per cell and direction")->check(CLI::PositiveNumber);

  std::vector<double> betas{0, 1, 3, 10};
  post::SweepOptions sweep;
  auto* bs = app.add_subcommand("beta-sweep", "fit the interface friction against a resolved run");
  bs->add_option("config", config)->required();
  bs->add_option("--betas", betas, "comma separated list")->delimiter(',');
  bs->add_option("--samples", sweep.samples, "points per band")->check(CLI::PositiveNumber);
  bs->add_option("--band", sweep.band_cells, "band width in cells")->check(CLI::PositiveNumber);
  bs->add_option("--dns-h", sweep.dns_target_h, "mesh size of the resolved run");

  double xi = 0.25, mu = 1.0, mu0 = 1.0, tau0 = 0.0, m = 1.0, h = 0.05;
  int free_cells = 4;
  std::string law = "newtonian";
  auto* rv = app.add_subcommand("rve", "cell porosity, permeability and friction coefficient");
  rv->add_option("xi", xi, "obstacle radius in cell units")->required();
  rv->add_option("--law", law, "newtonian or bingham");
  rv->add_option("--mu", mu);
  rv->add_option("--mu0", mu0);
  rv->add_option("--tau0", tau0);
  rv->add_option("--m", m);
  rv->add_option("--mesh-h", h, "cell mesh size");
  rv->add_option("--free-cells", free_cells, "boundary-layer stack height")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(config, threads, output, dump);
    if (*cmp) return cmd_compare(ref_dir, test_dir, sections, footprint);
    if (*bs) return cmd_sweep(config, betas, threads, sweep);
    if (*rv) return cmd_rve(xi, law, mu, mu0, tau0, m, h, free_cells);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return post::exit_code(e);
  }
  return 0;
}
