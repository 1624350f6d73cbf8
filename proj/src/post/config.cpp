#include "rebarflow/post/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace rebarflow::post {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kKeys = {
    {"geometry",
     {"mode", "x0", "y0", "width", "height", "rows", "cols", "cell_size", "radius", "origin_x", "origin_y",
      "rotation_deg", "left", "right", "bottom", "top", "target_h", "near_h", "grading", "rve_h"}},
    {"fluid", {"law", "mu", "mu0", "tau0", "m", "body_x", "body_y"}},
    {"bc", {"inlet_velocity", "outlet_pressure"}},
    {"interface", {"beta", "bl_free_cells", "bl_h", "bl_top"}},
    {"solver",
     {"tol_rel", "abs_tol", "max_iterations", "sigma", "rho", "cell_tol", "cell_max_iterations", "projection",
      "threads"}},
    {"output", {"directory", "vtk"}},
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  template <typename T>
  T get(const std::string& key, T fallback) const {
    if (!tree_) return fallback;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return fallback;
    const std::string raw = it->second.data();
    std::istringstream s(raw);
    T v;
    if (!(s >> v) || !(s >> std::ws).eof()) throw ConfigError(name_ + "." + key + ": bad value '" + raw + "'");
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!tree_) return fallback;
    const auto it = tree_->find(key);
    return it == tree_->not_found() ? fallback : it->second.data();
  }

  double positive(const std::string& key, double fallback) const {
    const double v = get(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(name_ + "." + key + " must be positive");
    return v;
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
};

mesh::BoundaryTag side_tag(const std::string& v) {
  try {
    return mesh::parse_boundary_tag([&] {
      std::string s = v;
      std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
      return s;
    }());
  } catch (const MeshError&) {
    throw ConfigError("unknown side condition '" + v + "'");
  }
}

std::string side_name(mesh::BoundaryTag t) { return lower(mesh::to_string(t)); }

ProfileRequest parse_profile(const std::string& name, const std::string& value) {
  std::istringstream s(value);
  std::string field;
  ProfileRequest r;
  r.name = name;
  if (!(s >> field >> r.a.x() >> r.a.y() >> r.b.x() >> r.b.y()))
    throw ConfigError("output.profile_" + name + ": expected '<field> x0 y0 x1 y1 [samples]'");
  r.field = parse_profile_field(field);
  if (!(s >> std::ws).eof() && !(s >> r.samples)) throw ConfigError("output.profile_" + name + ": bad sample count");
  if (!(s >> std::ws).eof()) throw ConfigError("output.profile_" + name + ": trailing text");
  if (r.samples < 2) throw ConfigError("output.profile_" + name + ": at least 2 samples");
  return r;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [sec, body] : tree) {
    const auto known = kKeys.find(sec);
    if (known == kKeys.end()) throw ConfigError("unknown config section [" + sec + "]");
    for (const auto& [key, v] : body) {
      if (known->second.count(key)) continue;
      if (sec == "output" && key.rfind("profile_", 0) == 0 && key.size() > 8) continue;
      throw ConfigError("unknown key '" + key + "' in [" + sec + "]");
    }
  }
  auto section = [&](const std::string& name) {
    const auto it = tree.find(name);
    return Section(it == tree.not_found() ? nullptr : &it->second, name);
  };

  RunConfig c;
  auto& s = c.scenario;
  const Section geo = section("geometry");
  const std::string mode = lower(geo.text("mode", "dns"));
  if (mode == "dns")
    s.mode = macro::Mode::Dns;
  else if (mode == "homogenized")
    s.mode = macro::Mode::Homogenized;
  else
    throw ConfigError("geometry.mode must be dns or homogenized");
  s.outer.x0 = geo.get("x0", s.outer.x0);
  s.outer.y0 = geo.get("y0", s.outer.y0);
  s.outer.width = geo.positive("width", s.outer.width);
  s.outer.height = geo.positive("height", s.outer.height);
  s.grid.rows = geo.get("rows", s.grid.rows);
  s.grid.cols = geo.get("cols", s.grid.cols);
  s.grid.cell_size = geo.positive("cell_size", s.grid.cell_size);
  s.grid.radius = geo.positive("radius", s.grid.radius);
  s.grid.origin = Vec2(geo.get("origin_x", s.grid.origin.x()), geo.get("origin_y", s.grid.origin.y()));
  s.grid.rotation_angle = geo.get("rotation_deg", 0.0) * std::numbers::pi / 180.0;
  s.sides.left = side_tag(geo.text("left", side_name(s.sides.left)));
  s.sides.right = side_tag(geo.text("right", side_name(s.sides.right)));
  s.sides.bottom = side_tag(geo.text("bottom", side_name(s.sides.bottom)));
  s.sides.top = side_tag(geo.text("top", side_name(s.sides.top)));
  s.target_h = geo.positive("target_h", s.target_h);
  s.near_h = geo.get("near_h", s.near_h);
  s.grading = geo.positive("grading", s.grading);
  s.rve_h = geo.positive("rve_h", s.rve_h);

  const Section fluid = section("fluid");
  const std::string law = lower(fluid.text("law", "newtonian"));
  if (law == "newtonian")
    s.law = constitutive::FluidLaw::newtonian(fluid.positive("mu", 1.0));
  else if (law == "bingham")
    s.law = constitutive::FluidLaw::bingham(fluid.positive("mu0", 1.0), fluid.get("tau0", 0.0),
                                            fluid.positive("m", 1.0));
  else
    throw ConfigError("fluid.law must be newtonian or bingham");
  if (fluid.get("tau0", 0.0) < 0.0) throw ConfigError("fluid.tau0 must be non-negative");
  s.body_force = Vec2(fluid.get("body_x", 0.0), fluid.get("body_y", 0.0));

  const Section bc = section("bc");
  s.inlet_velocity = bc.get("inlet_velocity", s.inlet_velocity);
  s.outlet_pressure = bc.get("outlet_pressure", s.outlet_pressure);

  const Section itf = section("interface");
  const std::string beta = lower(itf.text("beta", "0"));
  if (beta == "boundary_layer") {
    s.beta.from_boundary_layer = true;
  } else {
    s.beta.value = itf.get("beta", 0.0);
  }
  s.beta.boundary_layer.free_cells = itf.get("bl_free_cells", s.beta.boundary_layer.free_cells);
  if (s.beta.boundary_layer.free_cells < 1) throw ConfigError("interface.bl_free_cells must be at least 1");
  s.beta.boundary_layer.target_h = itf.positive("bl_h", s.beta.boundary_layer.target_h);
  const std::string top = lower(itf.text("bl_top", "slip"));
  if (top == "slip")
    s.beta.boundary_layer.top = micro::BlTopCondition::Slip;
  else if (top == "no_slip")
    s.beta.boundary_layer.top = micro::BlTopCondition::NoSlipT;
  else
    throw ConfigError("interface.bl_top must be slip or no_slip");

  const Section sol = section("solver");
  auto& nc = s.solver.newton;
  nc.tol_rel = sol.positive("tol_rel", nc.tol_rel);
  nc.abs_tol = sol.positive("abs_tol", nc.abs_tol);
  nc.max_iterations = sol.get("max_iterations", nc.max_iterations);
  if (nc.max_iterations < 1) throw ConfigError("solver.max_iterations must be at least 1");
  nc.sigma = sol.positive("sigma", nc.sigma);
  nc.rho = sol.positive("rho", nc.rho);
  if (nc.sigma >= 1.0 || nc.rho >= 1.0) throw ConfigError("solver.sigma and solver.rho must lie in (0, 1)");
  s.solver.cell.tol_rel = sol.positive("cell_tol", s.solver.cell.tol_rel);
  s.solver.cell.max_iterations = sol.get("cell_max_iterations", s.solver.cell.max_iterations);
  const std::string proj = lower(sol.text("projection", "exact"));
  if (proj == "exact")
    s.solver.projection = fem::TangentProjection::Exact;
  else if (proj == "deviatoric")
    s.solver.projection = fem::TangentProjection::Deviatoric;
  else
    throw ConfigError("solver.projection must be exact or deviatoric");
  s.solver.cell.projection = s.solver.projection;
  s.solver.threads = sol.get("threads", s.solver.threads);

  const auto out_it = tree.find("output");
  const Section out = section("output");
  c.output.directory = out.text("directory", c.output.directory);
  if (c.output.directory.empty()) throw ConfigError("output.directory must not be empty");
  const std::string vtk = lower(out.text("vtk", "true"));
  if (vtk != "true" && vtk != "false") throw ConfigError("output.vtk must be true or false");
  c.output.vtk = vtk == "true";
  if (out_it != tree.not_found())
    for (const auto& [key, v] : out_it->second)
      if (key.rfind("profile_", 0) == 0) c.output.profiles.push_back(parse_profile(key.substr(8), v.data()));

  try {
    s.validate();
  } catch (const MeshError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

std::string format_config(const RunConfig& c) {
  const auto& s = c.scenario;
  std::ostringstream o;
  o << "[geometry]\n"
    << "mode = " << (s.mode == macro::Mode::Dns ? "dns" : "homogenized") << '\n'
    << "x0 = " << fmt(s.outer.x0) << "\ny0 = " << fmt(s.outer.y0) << "\nwidth = " << fmt(s.outer.width)
    << "\nheight = " << fmt(s.outer.height) << "\nrows = " << s.grid.rows << "\ncols = " << s.grid.cols
    << "\ncell_size = " << fmt(s.grid.cell_size) << "\nradius = " << fmt(s.grid.radius)
    << "\norigin_x = " << fmt(s.grid.origin.x()) << "\norigin_y = " << fmt(s.grid.origin.y())
    << "\nrotation_deg = " << fmt(s.grid.rotation_angle * 180.0 / std::numbers::pi)
    << "\nleft = " << side_name(s.sides.left) << "\nright = " << side_name(s.sides.right)
    << "\nbottom = " << side_name(s.sides.bottom) << "\ntop = " << side_name(s.sides.top)
    << "\ntarget_h = " << fmt(s.target_h) << "\nnear_h = " << fmt(s.near_h) << "\ngrading = " << fmt(s.grading)
    << "\nrve_h = " << fmt(s.rve_h) << "\n\n[fluid]\n";
  if (const auto* b = std::get_if<constitutive::Bingham>(&s.law.parameters()))
    o << "law = bingham\nmu0 = " << fmt(b->mu0) << "\ntau0 = " << fmt(b->tau0) << "\nm = " << fmt(b->m) << '\n';
  else
    o << "law = newtonian\nmu = " << fmt(s.law.base_viscosity()) << '\n';
  o << "body_x = " << fmt(s.body_force.x()) << "\nbody_y = " << fmt(s.body_force.y()) << "\n\n[bc]\n"
    << "inlet_velocity = " << fmt(s.inlet_velocity) << "\noutlet_pressure = " << fmt(s.outlet_pressure)
    << "\n\n[interface]\nbeta = " << (s.beta.from_boundary_layer ? "boundary_layer" : fmt(s.beta.value))
    << "\nbl_free_cells = " << s.beta.boundary_layer.free_cells << "\nbl_h = " << fmt(s.beta.boundary_layer.target_h)
    << "\nbl_top = " << (s.beta.boundary_layer.top == micro::BlTopCondition::Slip ? "slip" : "no_slip")
    << "\n\n[solver]\n"
    << "tol_rel = " << fmt(s.solver.newton.tol_rel) << "\nabs_tol = " << fmt(s.solver.newton.abs_tol)
    << "\nmax_iterations = " << s.solver.newton.max_iterations << "\nsigma = " << fmt(s.solver.newton.sigma)
    << "\nrho = " << fmt(s.solver.newton.rho) << "\ncell_tol = " << fmt(s.solver.cell.tol_rel)
    << "\ncell_max_iterations = " << s.solver.cell.max_iterations
    << "\nprojection = " << (s.solver.projection == fem::TangentProjection::Exact ? "exact" : "deviatoric")
    << "\nthreads = " << s.solver.threads << "\n\n[output]\n"
    << "directory = " << c.output.directory << "\nvtk = " << (c.output.vtk ? "true" : "false") << '\n';
  for (const auto& p : c.output.profiles)
    o << "profile_" << p.name << " = " << to_string(p.field) << ' ' << fmt(p.a.x()) << ' ' << fmt(p.a.y()) << ' '
      << fmt(p.b.x()) << ' ' << fmt(p.b.y()) << ' ' << p.samples << '\n';
  return o.str();
}

}  // namespace rebarflow::post
