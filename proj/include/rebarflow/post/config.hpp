#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rebarflow/macro/scenario.hpp"
#include "rebarflow/post/profile.hpp"

namespace rebarflow::post {

struct OutputSettings {
  std::string directory = "output";  // relative to the working directory
  bool vtk = true;
  std::vector<ProfileRequest> profiles;
};

struct RunConfig {
  macro::Scenario scenario;
  OutputSettings output;
};

/// INI document with sections geometry, fluid, bc, interface, solver, output.
/// Unknown sections or keys and malformed values raise ConfigError.
/// Profiles are keys "profile_<name> = <field> x0 y0 x1 y1 [samples]" in [output].
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Canonical form; parse_config(format_config(c)) reproduces c.
std::string format_config(const RunConfig& config);

}  // namespace rebarflow::post
