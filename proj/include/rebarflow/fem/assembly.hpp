#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rebarflow/constitutive/fluid_law.hpp"
#include "rebarflow/fem/dof_map.hpp"
#include "rebarflow/fem/quadrature.hpp"
#include "rebarflow/fem/system_matrix.hpp"
#include "rebarflow/mesh/mesh.hpp"

namespace rebarflow::fem {

// Residual convention: R(x) = f_int - f_ext, Newton solves J dx = -R.
//   Stokes rows:   int D(dw):tau - int div(dw) p - int dw.rho_b
//   continuity:    int dq div(u)
//   Darcy rows:    int dwbar.ubar - int dwbar.wbar(grad pbar, rho_b)
//   Darcy mass:    int dqbar div(ubar)
//   interface:     int_G dw_t beta u_t - int_G dw_n pbar
//   outlet:        int dw_n p_hat

enum class ViscousForm {
  SymmetricGradient,  // int D(dw) : tau(D(u))
  Laplacian,          // int grad(dw) : mu grad(u), Newtonian only
};

enum class TangentProjection {
  Exact,       // d tau / d grad(u) through the symmetric part
  Deviatoric,  // tangent composed with I_dev
};

using BodyForce = std::function<Vec2(const Vec2&)>;

struct StokesTerms {
  const constitutive::FluidLaw* law = nullptr;
  ViscousForm form = ViscousForm::SymmetricGradient;
  TangentProjection projection = TangentProjection::Exact;
  BodyForce body;  // empty means zero
  /// 7-point rule unless overridden (quadrature sufficiency checks).
  const QuadratureRule* viscous_rule = nullptr;
};

/// Homogenized seepage response, one evaluation per Darcy element.
class DarcyLaw {
 public:
  struct Response {
    Vec2 flux = Vec2::Zero();              // wbar
    Mat2 dflux_dgrad = Mat2::Zero();       // d wbar / d grad(pbar)
  };
  virtual ~DarcyLaw() = default;
  virtual std::vector<Response> evaluate(std::span<const int> elements, std::span<const Vec2> gradients,
                                         const Vec2& body) = 0;
  /// Number of sub-scale solves performed so far.
  virtual long solve_count() const { return 0; }
};

/// Boundary edge with its outward normal relative to one adjacent triangle.
struct EdgeFrame {
  int edge = -1;
  int triangle = -1;
  Vec2 normal = Vec2::Zero();
  double length = 0.0;
};

/// Frames for all edges with `tag`. With `side` set, the normal points out of
/// the adjacent triangle of that region; edges without such a neighbour are skipped.
std::vector<EdgeFrame> edge_frames(const mesh::Mesh& mesh, mesh::BoundaryTag tag,
                                   std::optional<mesh::Region> side = std::nullopt);

/// Length-weighted average of incident frame normals at every node on the
/// frames, normalized; zero elsewhere.
std::vector<Vec2> node_normals(const mesh::Mesh& mesh, std::span<const EdgeFrame> frames);

/// Raw DOF list of a Stokes or Darcy triangle: 12 velocities then 3 pressures.
std::array<int, 15> triangle_dofs(const DofMap& dofs, int triangle);

/// Enters all element and interface couplings into the pattern.
void add_pattern(SparsityBuilder& builder, const DofMap& dofs, std::span<const EdgeFrame> interface);

void assemble_stokes(const DofMap& dofs, const StokesTerms& terms, const Eigen::VectorXd& state,
                     Accumulator& acc);

/// Returns the per-element law responses used (indexed like Darcy triangles in mesh order).
std::vector<DarcyLaw::Response> assemble_darcy(const DofMap& dofs, DarcyLaw& law, const Vec2& body,
                                               const Eigen::VectorXd& state, Accumulator& acc);

/// Interface friction and pressure coupling; frames must carry the Darcy-outward normal.
void assemble_interface(const DofMap& dofs, std::span<const EdgeFrame> frames, double beta,
                        const Eigen::VectorXd& state, Accumulator& acc);

/// + int dw . n p_hat over the frames (prescribed normal traction -p_hat n).
void assemble_normal_traction(const DofMap& dofs, std::span<const EdgeFrame> frames, double p_hat,
                              Accumulator& acc);

/// - int dw . load over edges with `tag`.
void assemble_edge_load(const DofMap& dofs, mesh::BoundaryTag tag, const Vec2& load, Accumulator& acc);

/// Darcy-element macro gradient grad(pbar), constant per element.
Vec2 darcy_gradient(const DofMap& dofs, int triangle, const Eigen::VectorXd& state);

}  // namespace rebarflow::fem
