#pragma once

#include <utility>
#include <vector>

#include "rebarflow/constitutive/fluid_law.hpp"
#include "rebarflow/mesh/mesh.hpp"

namespace rebarflow::micro {

enum class BlTopCondition {
  Slip,     // u_y = 0, zero shear traction
  NoSlipT,  // u_t = 0, zero normal traction
};

struct BoundaryLayerOptions {
  int free_cells = 4;
  double target_h = 0.05;
  BlTopCondition top = BlTopCondition::Slip;
};

struct BoundaryLayerResult {
  double c_bl = 0.0;
  double beta = 0.0;
  double mu = 0.0;
  int free_cells = 0;
  double height = 0.0;  // truncation height above the interface
  /// (x, u_t) at interface nodes, sorted by x.
  std::vector<std::pair<double, double>> trace;
};

/// Stokes problem (unit viscosity, Laplacian form) on a porous cell topped by
/// free cells, periodic in x, u = 0 on the obstacle and the bottom, driven by a
/// unit jump of tangential traction across the interface y = 1. C_bl = int_G u_t ds, beta = -mu / C_bl.
BoundaryLayerResult solve_boundary_layer(double xi, const constitutive::FluidLaw& law,
                                         const BoundaryLayerOptions& options = {});

/// Same, on a given P1/P2 stacked mesh.
BoundaryLayerResult solve_boundary_layer(const mesh::Mesh& stack, const constitutive::FluidLaw& law,
                                         const BoundaryLayerOptions& options = {});

}  // namespace rebarflow::micro
