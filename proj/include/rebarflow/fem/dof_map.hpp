#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "rebarflow/common.hpp"
#include "rebarflow/mesh/mesh.hpp"

namespace rebarflow::fem {

enum class Field { Velocity, Pressure, DarcyVelocity, DarcyPressure };

/// Raw degrees of freedom for the four fields and their affine elimination
/// into a reduced unknown vector: raw = T * x + g.
///
/// Stokes fields live on nodes of FLUID / RVE_FLUID triangles, Darcy fields
/// on nodes of DARCY triangles; nodes on the interface carry both. Velocity
/// raw DOFs are Cartesian. Interface nodes get a reduced basis aligned with
/// (n, t), the Darcy velocity there is tied to n * (n . u).
class DofMap {
 public:
  struct Term {
    int reduced;
    double coef;
  };

  explicit DofMap(const mesh::Mesh& mesh);

  const mesh::Mesh& mesh() const { return *mesh_; }

  int velocity(int node, int comp) const { return velocity_[node] < 0 ? -1 : velocity_[node] + comp; }
  int pressure(int vertex) const { return vertex < num_vertices_ ? pressure_[vertex] : -1; }
  int darcy_velocity(int node, int comp) const {
    return darcy_velocity_[node] < 0 ? -1 : darcy_velocity_[node] + comp;
  }
  int darcy_pressure(int vertex) const { return vertex < num_vertices_ ? darcy_pressure_[vertex] : -1; }
  bool has_stokes(int node) const { return velocity_[node] >= 0; }
  bool has_darcy(int node) const { return darcy_velocity_[node] >= 0; }
  int num_raw() const { return num_raw_; }
  Field field_of(int raw) const { return raw_field_[raw]; }

  // Constraint registration; only valid before finalize().
  /// dir . u = value on the Stokes velocity of a node.
  void prescribe_velocity(int node, const Vec2& dir, double value);
  void prescribe_darcy_velocity(int node, const Vec2& dir, double value);
  void fix_velocity(int node, const Vec2& value);
  /// Darcy velocity at an interface node follows n * (n . u); n is normalized here.
  void couple_interface(int node, const Vec2& normal);
  /// Identify all fields of slave with those of master.
  void make_periodic(int master, int slave);
  void pin_pressure(int vertex, double value);
  void pin_darcy_pressure(int vertex, double value);

  /// Builds the elimination. Throws SolverError on over-constrained or
  /// inconsistent node constraints.
  void finalize();
  bool finalized() const { return finalized_; }

  int num_reduced() const { return num_reduced_; }
  std::span<const Term> expansion(int raw) const {
    return {terms_.data() + start_[raw], terms_.data() + start_[raw + 1]};
  }
  double offset(int raw) const { return offset_[raw]; }
  bool is_constrained(int raw) const;
  Field reduced_field(int r) const { return reduced_field_[r]; }

  /// raw = T x + g
  Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const;
  /// T x (no lift)
  Eigen::VectorXd expand_direction(const Eigen::VectorXd& reduced) const;
  /// T^T r
  Eigen::VectorXd restrict(const Eigen::VectorXd& raw) const;
  /// Least-squares style inverse for states that already satisfy the constraints.
  Eigen::VectorXd reduce(const Eigen::VectorXd& raw) const;

  /// Node normals of an interface node, zero if not coupled.
  const std::vector<Vec2>& interface_normals() const { return normal_; }

 private:
  struct NodeConstraint {
    Vec2 dir;
    double value;
  };
  int find(int node) const;

  const mesh::Mesh* mesh_;
  int num_vertices_ = 0;
  std::vector<int> velocity_, pressure_, darcy_velocity_, darcy_pressure_;
  std::vector<Field> raw_field_;
  int num_raw_ = 0;

  std::vector<std::vector<NodeConstraint>> u_cons_, ubar_cons_;
  std::vector<Vec2> normal_;
  std::vector<double> p_pin_, pbar_pin_;
  std::vector<char> p_pinned_, pbar_pinned_;
  mutable std::vector<int> parent_;

  bool finalized_ = false;
  int num_reduced_ = 0;
  std::vector<int> start_;
  std::vector<Term> terms_;
  std::vector<double> offset_;
  std::vector<Field> reduced_field_;
  // Reduced DOF r equals dir . (raw[source], raw[source + 1]) for velocities,
  // raw[source] for pressures.
  std::vector<int> reduce_source_;
  std::vector<Vec2> reduce_dir_;
};

}  // namespace rebarflow::fem
