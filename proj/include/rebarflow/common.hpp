#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace rebarflow {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Error categories map onto the CLI exit codes (config 1, mesh 2, solver 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MeshError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace rebarflow
