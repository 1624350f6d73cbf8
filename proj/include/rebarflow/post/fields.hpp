#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rebarflow/macro/scenario.hpp"
#include "rebarflow/mesh/mesh.hpp"
#include "rebarflow/mesh/point_locator.hpp"

namespace rebarflow::post {

/// Nodal values on the P2 mesh, detached from the DOF layout. Pressures at
/// edge midpoints are the P1 interpolant.
struct FieldSet {
  std::shared_ptr<const mesh::Mesh> mesh;
  std::vector<char> has_stokes;
  std::vector<Vec2> velocity;
  std::vector<double> pressure;
  std::vector<char> has_darcy;
  std::vector<Vec2> seepage;
  std::vector<double> darcy_pressure;

  bool any_darcy() const;
};

FieldSet fields_from(const macro::SolveReport& report);

/// One line of a field file.
struct FieldRow {
  int id = 0;
  double x = 0.0, y = 0.0;
  double ux = 0.0, uy = 0.0, p = 0.0;
};

std::vector<FieldRow> stokes_rows(const FieldSet& f);
std::vector<FieldRow> darcy_rows(const FieldSet& f);

/// Header "id,x,y,u_x,u_y,p", values printed with 17 significant digits.
void write_fields_csv(const std::string& path, const std::vector<FieldRow>& rows);
std::vector<FieldRow> read_fields_csv(const std::string& path);

/// Rebuilds a field set from a mesh and the two field files (the Darcy file may be absent).
FieldSet assemble_fields(std::shared_ptr<const mesh::Mesh> mesh, const std::vector<FieldRow>& stokes,
                         const std::vector<FieldRow>& darcy);

/// FE interpolation of a field set: P2 velocity, P1 pressure. Stokes values
/// in fluid triangles, Darcy values in Darcy triangles.
class FieldSampler {
 public:
  struct Value {
    Vec2 velocity = Vec2::Zero();
    double pressure = 0.0;
    bool darcy = false;
    int triangle = -1;
  };

  explicit FieldSampler(const FieldSet& fields);

  /// Empty outside the mesh, e.g. inside an obstacle.
  std::optional<Value> at(const Vec2& x) const;
  const FieldSet& fields() const { return *fields_; }
  /// Bounding box of the mesh vertices.
  Vec2 lower() const { return lo_; }
  Vec2 upper() const { return hi_; }

 private:
  const FieldSet* fields_;
  mesh::PointLocator locator_;
  Vec2 lo_, hi_;
};

}  // namespace rebarflow::post
