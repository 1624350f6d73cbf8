#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rebarflow/macro/solvers.hpp"
#include "rebarflow/micro/boundary_layer.hpp"
#include "rebarflow/micro/rve_problem.hpp"
#include "rebarflow/post/compare.hpp"
#include "rebarflow/post/config.hpp"
#include "rebarflow/post/fields.hpp"
#include "stokes_fixtures.hpp"

using namespace rebarflow;
using constitutive::FluidLaw;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) ok = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (cond ? "" : " [x]");
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

post::RunConfig scenario(const std::string& file) {
  return post::load_config(std::string(REBARFLOW_SCENARIOS) + "/" + file);
}

struct Run {
  post::RunData data;
  macro::SolveReport report;
};

Run solve(const post::RunConfig& c) {
  auto report = macro::solve(c.scenario);
  auto fields = post::fields_from(report);
  return {{c, std::move(fields)}, std::move(report)};
}

int newton_steps(const macro::SolveReport& r) { return static_cast<int>(r.history.size()) - 1; }

bool monotone(const macro::SolveReport& r) {
  for (std::size_t k = 1; k < r.history.size(); ++k)
    if (!(r.history[k].residual < r.history[k - 1].residual)) return false;
  return true;
}

// Largest ||r_{k+1}|| / ||r_k||^2 over the last two steps.
double quadratic_constant(const macro::SolveReport& r) {
  const auto& h = r.history;
  if (h.size() < 3) return INFINITY;
  double worst = 0.0;
  for (std::size_t k = h.size() - 2; k < h.size(); ++k)
    worst = std::max(worst, h[k].residual / std::pow(h[k - 1].residual, 2));
  return worst;
}

// Largest ||r_{k+1}|| / ||r_k|| over the last two steps.
double final_contraction(const macro::SolveReport& r) {
  const auto& h = r.history;
  if (h.size() < 3) return INFINITY;
  return std::max(h[h.size() - 1].residual / h[h.size() - 2].residual,
                  h[h.size() - 2].residual / h[h.size() - 3].residual);
}

// Runs of criterion 1-3 reused by criterion 8.
std::vector<const macro::SolveReport*> newtonian_runs;
std::vector<std::pair<std::string, const macro::SolveReport*>> bingham_runs;

void criterion1(Check& c) {
  const auto t0 = Clock::now();
  static Run dns = solve(scenario("b1_dns.ini"));
  static Run hom = solve(scenario("b1_hom.ini"));
  const double elapsed = seconds_since(t0);
  newtonian_runs.push_back(&dns.report);
  newtonian_runs.push_back(&hom.report);

  const auto m = post::compare(dns.data, hom.data, post::default_sections(dns.data.config.scenario));
  c.expect(m.pressure_field_error >= 0.05 && m.pressure_field_error <= 0.15,
           "pressure discrepancy " + fmt(100 * m.pressure_field_error) + "% in [5, 15]%");

  const auto& f = hom.data.fields;
  Vec2 mean = Vec2::Zero();
  int n = 0;
  for (std::size_t v = 0; v < f.seepage.size(); ++v)
    if (f.has_darcy[v]) mean += f.seepage[v], ++n;
  mean /= std::max(n, 1);
  double spread = 0.0;
  for (std::size_t v = 0; v < f.seepage.size(); ++v)
    if (f.has_darcy[v]) spread = std::max(spread, (f.seepage[v] - mean).norm());
  const double rel = n > 0 && mean.norm() > 0 ? spread / mean.norm() : INFINITY;
  c.expect(rel < 1e-6, "seepage nonuniformity " + fmt(rel) + " < 1e-6");
  c.expect(elapsed < 300.0, "runtime " + fmt(elapsed) + " s < 300 s");
}

post::RunConfig b2(const std::string& mode, double xi, double beta) {
  auto c = scenario(mode == "dns" ? "b2_dns.ini" : "b2_hom.ini");
  c.scenario.grid.radius = xi;
  c.scenario.beta.value = beta;
  return c;
}

void criterion2(Check& c) {
  static Run dns = solve(b2("dns", 0.125, 0.0));
  static Run hom = solve(b2("hom", 0.125, 0.0));
  newtonian_runs.push_back(&dns.report);
  newtonian_runs.push_back(&hom.report);
  const auto m = post::compare(dns.data, hom.data, post::default_sections(dns.data.config.scenario));
  c.expect(m.velocity_error < 0.01, "velocity error " + fmt(100 * m.velocity_error) + "% < 1%");
  c.expect(m.gradient_error < 0.05, "gradient error " + fmt(100 * m.gradient_error) + "% < 5%");
  const int nh = hom.report.mesh->num_nodes(), nd = dns.report.mesh->num_nodes();
  c.expect(nh >= 100 && nh <= 1000, "homogenized nodes " + std::to_string(nh));
  c.expect(nd >= 10000 && nd <= 100000, "DNS nodes " + std::to_string(nd));
  c.expect(nd >= 50 * nh, "reduction " + fmt(double(nd) / nh) + "x >= 50x");
}

// Bingham homogenized runs use a coarser cell mesh to keep the run time bounded.
constexpr double kBinghamRveH = 0.08;

void criterion3(Check& c) {
  struct Case {
    std::string name;
    double xi, beta, rotation, bound;
  };
  const std::vector<Case> cases{{"xi=0.125", 0.125, 0.0, 0.0, 0.01},
                                {"xi=0.25", 0.25, 3.0, 0.0, 0.01},
                                {"xi=0.125 rotated", 0.125, 0.0, std::numbers::pi / 6, 0.05}};
  static std::vector<Run> runs;
  runs.reserve(2 * cases.size());
  for (const auto& k : cases) {
    auto cd = b2("dns", k.xi, k.beta), ch = b2("hom", k.xi, k.beta);
    for (auto* cfg : {&cd, &ch}) {
      cfg->scenario.law = FluidLaw::bingham(20.0, 20.0, 15.0);
      cfg->scenario.grid.rotation_angle = k.rotation;
      cfg->scenario.rve_h = kBinghamRveH;
    }
    try {
      runs.push_back(solve(cd));
      const auto& dns = runs.back();
      runs.push_back(solve(ch));
      const auto& hom = runs.back();
      bingham_runs.emplace_back(k.name + " dns", &dns.report);
      bingham_runs.emplace_back(k.name + " hom", &hom.report);
      const auto m = post::compare(dns.data, hom.data, post::default_sections(cd.scenario));
      c.expect(m.velocity_error < k.bound,
               k.name + " velocity error " + fmt(100 * m.velocity_error) + "% < " + fmt(100 * k.bound) + "%");
    } catch (const std::exception& e) {
      c.expect(false, k.name + ": " + e.what());
    }
  }
}

void criterion4(Check& c) {
  const std::vector<double> betas{0, 1, 3, 10};
  for (auto [xi, expected] : {std::pair{0.125, 0.0}, {0.25, 3.0}, {0.35, 10.0}}) {
    post::SweepOptions o;
    o.dns_target_h = b2("dns", xi, 0).scenario.target_h;
    const auto r = post::beta_sweep(b2("hom", xi, 0).scenario, betas, o);
    std::string ms;
    for (double v : r.mismatch) ms += (ms.empty() ? "" : " ") + fmt(v);
    c.expect(r.best == expected, "xi=" + fmt(xi) + " argmin beta " + fmt(r.best) + " (expected " + fmt(expected) +
                                     ", mismatch " + ms + ")");
  }
}

void criterion5(Check& c) {
  using namespace test_support;
  const ManufacturedStokes ex{1.0};
  const auto law = FluidLaw::newtonian(ex.mu);
  auto u = [&](const Vec2& x) { return ex.velocity(x); };
  auto p = [&](const Vec2& x) { return ex.pressure(x); };
  auto b = [&](const Vec2& x) { return ex.body(x); };
  // three refinements of h = 1/8; h = 1/4 is pre-asymptotic for the pressure
  std::vector<double> eu, ep;
  for (int n : {8, 16, 32, 64}) {
    const auto s = solve_dirichlet_stokes(1, 1, 1.0 / n, law, u, p, b);
    const auto e = l2_errors(s, u, p);
    eu.push_back(e.velocity);
    ep.push_back(e.pressure);
  }
  const double ru = std::log2(eu[2] / eu[3]), rp = std::log2(ep[2] / ep[3]);
  c.expect(std::abs(ru - 3.0) <= 0.2, "velocity order " + fmt(ru));
  c.expect(std::abs(rp - 2.0) <= 0.2, "pressure order " + fmt(rp));

  const double mu = 1.7, g = 0.6;
  auto up = [&](const Vec2& x) { return Vec2(x.y() * (1 - x.y()), 0.0); };
  // -(mu/2) u'' = -dp/dx with u'' = -2
  auto pp = [&](const Vec2& x) { return g - mu * x.x(); };
  auto s = solve_dirichlet_stokes(3, 1, 0.2, FluidLaw::newtonian(mu), up, pp);
  double worst = 0.0;
  for (int v = 0; v < s.mesh->num_nodes(); ++v) {
    const Vec2 x = s.mesh->nodes[v];
    worst = std::max(worst, std::abs(s.raw[s.dofs->velocity(v, 0)] - up(x).x()));
    worst = std::max(worst, std::abs(s.raw[s.dofs->velocity(v, 1)]));
    if (v < s.mesh->num_vertices) worst = std::max(worst, std::abs(s.raw[s.dofs->pressure(v)] - pp(x)));
  }
  c.expect(worst < 1e-10, "Poiseuille nodal error " + fmt(worst));
}

void criterion6(Check& c) {
  const micro::RveProblem n(0.25, FluidLaw::newtonian(1.0), 0.05);
  const Mat2 k = n.tangent_permeability(n.solve_cell(Vec2::Zero(), Vec2::Zero()));
  const double asym = (k - k.transpose()).norm() / k.norm();
  c.expect(asym < 1e-6, "asymmetry " + fmt(asym));
  const Eigen::SelfAdjointEigenSolver<Mat2> eig(0.5 * (k + k.transpose()));
  c.expect(eig.eigenvalues().minCoeff() > 0.0, "min eigenvalue " + fmt(eig.eigenvalues().minCoeff()));
  const double off = std::abs(k(0, 1)) / k(0, 0);
  c.expect(off < 1e-6, "off-diagonal " + fmt(off));

  std::mt19937 gen(7);
  std::uniform_real_distribution<double> uni(-5, 5);
  double lin = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Vec2 g(uni(gen), uni(gen)), b(uni(gen), uni(gen));
    const Vec2 flux = n.seepage_flux(n.solve_cell(g, b));
    lin = std::max(lin, (flux - k * (b - g)).norm() / std::max(flux.norm(), 1e-300));
  }
  c.expect(lin < 1e-10, "linearity " + fmt(lin));

  const micro::RveProblem b0(0.25, FluidLaw::bingham(1.0, 0.0, 15.0), 0.05);
  const Vec2 g(-0.8, 0.35);
  const Vec2 fb = b0.seepage_flux(b0.solve_cell(g, Vec2::Zero()));
  const Vec2 fn = n.seepage_flux(n.solve_cell(g, Vec2::Zero()));
  const double same = (fb - fn).norm() / fn.norm();
  c.expect(same < 1e-10, "zero yield stress vs Newtonian " + fmt(same));

  const micro::RveProblem bi(0.25, FluidLaw::bingham(20.0, 20.0, 15.0), 0.1);
  double worst = 0.0;
  for (const Vec2& g0 : {Vec2(-1.0, -0.5), Vec2(-30.0, 12.0)}) {
    const auto s0 = bi.solve_cell(g0, Vec2::Zero());
    const Mat2 kt = bi.tangent_permeability(s0);
    Mat2 fd;
    const double eps = 1e-5 * g0.norm();
    for (int col = 0; col < 2; ++col) {
      const Vec2 e = eps * Vec2::Unit(col);
      fd.col(col) = -(bi.seepage_flux(bi.solve_cell(g0 + e, Vec2::Zero(), &s0)) -
                      bi.seepage_flux(bi.solve_cell(g0 - e, Vec2::Zero(), &s0))) / (2 * eps);
    }
    worst = std::max(worst, (kt - fd).norm() / kt.norm());
  }
  c.expect(worst < 1e-6, "Bingham flux tangent vs differences " + fmt(worst));
}

constitutive::SymTensor2 random_tensor(std::mt19937& gen, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  constitutive::SymTensor2 d{u(gen), u(gen), u(gen)};
  return (scale / std::max(d.norm(), 1e-12)) * d;
}

void criterion7(Check& c) {
  const auto law = FluidLaw::bingham(20.0, 20.0, 15.0);
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> logj(-3.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double j = std::pow(10.0, logj(gen));
    const auto d = random_tensor(gen, std::sqrt(2.0 * j));
    const auto dir = random_tensor(gen, 1.0);
    const double eps = 1e-6 * d.norm();
    const auto fd = (1.0 / (2 * eps)) * (constitutive::deviatoric_stress(law, d + eps * dir) -
                                         constitutive::deviatoric_stress(law, d - eps * dir));
    const auto an = constitutive::tangent(law, d).apply(dir);
    worst = std::max(worst, (fd - an).norm() / an.norm());
  }
  c.expect(worst < 1e-5, "worst tangent error " + fmt(worst));
  const double rest = 20.0 + 20.0 * 15.0;
  const double err = std::abs(law.apparent_viscosity(0.0) - rest) / rest;
  const double near = std::abs(law.apparent_viscosity(1e-20) - rest) / rest;
  c.expect(err < 1e-8 && near < 1e-8, "rest limit " + fmt(std::max(err, near)));
}

void criterion8(Check& c) {
  for (const auto* r : newtonian_runs)
    c.expect(newton_steps(*r) == 1, macro::to_string(r->mode) + " Newtonian iterations " +
                                        std::to_string(newton_steps(*r)));
  if (bingham_runs.empty()) c.expect(false, "no Bingham runs");
  for (const auto& [name, r] : bingham_runs) {
    c.expect(monotone(*r), name + " monotone");
    const double q = quadratic_constant(*r);
    c.expect(q <= 100.0, name + " quadratic constant " + fmt(q));
    const double rate = final_contraction(*r);
    c.expect(rate <= 1e-2, name + " final contraction " + fmt(rate));
  }
}

void criterion9(Check& c) {
  const auto newton = FluidLaw::newtonian(1.0);
  for (double xi : {0.125, 0.25, 0.35}) {
    micro::BoundaryLayerOptions o6;
    o6.free_cells = 6;
    const double c4 = micro::solve_boundary_layer(xi, newton).c_bl;
    const double c6 = micro::solve_boundary_layer(xi, newton, o6).c_bl;
    c.expect(c4 < 0.0, "C_bl(" + fmt(xi) + ") = " + fmt(c4));
    const double rel = std::abs(c6 - c4) / std::abs(c4);
    c.expect(rel < 0.01, "truncation " + fmt(rel));
  }
  const double b1 = micro::solve_boundary_layer(0.25, FluidLaw::newtonian(1.3)).beta;
  const double b2 = micro::solve_boundary_layer(0.25, FluidLaw::newtonian(2.6)).beta;
  c.expect(b2 == 2.0 * b1, "beta(2 mu) = 2 beta(mu)");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"unidirectional benchmark", criterion1},
      {"Newtonian flow over reinforced area", criterion2},
      {"Bingham benchmark", criterion3},
      {"friction study", criterion4},
      {"manufactured solution and Poiseuille", criterion5},
      {"cell property suite", criterion6},
      {"constitutive tangent suite", criterion7},
      {"nonlinear solver suite", criterion8},
      {"boundary-layer suite", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    failed += !c.ok;
    std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first << ", "
              << fmt(seconds_since(t0)) << " s): " << c.detail.str() << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
