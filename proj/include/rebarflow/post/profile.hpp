#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rebarflow/macro/scenario.hpp"
#include "rebarflow/post/fields.hpp"

namespace rebarflow::post {

enum class ProfileField {
  VelocityX,
  VelocityY,
  Pressure,               // p in the fluid, pbar in the block
  AveragedPressure,       // pbar only
  ReconstructedPressure,  // p in the fluid, pbar + p^S in the block
};

std::string to_string(ProfileField f);
ProfileField parse_profile_field(const std::string& name);

struct ProfileRequest {
  std::string name;
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  ProfileField field = ProfileField::Pressure;
  int samples = 200;
};

struct ProfilePoint {
  double s = 0.0;  // arc length from a
  Vec2 x = Vec2::Zero();
  std::optional<double> value;  // empty inside obstacles
};

class PressureReconstruction;

/// Samples `samples` equidistant points from a to b inclusive. Throws
/// ConfigError when an endpoint lies outside the domain.
std::vector<ProfilePoint> extract_profile(const FieldSampler& fields, const ProfileRequest& request,
                                          PressureReconstruction* reconstruction = nullptr);

/// "s,x,y,value" with "nan" for absent points.
void write_profile_csv(const std::string& path, const std::vector<ProfilePoint>& profile);

/// Pointwise pressure in the homogenized block:
///   p(x) = pbar(xc) + grad pbar . (x - xc) + p^S(y)
/// with xc the Darcy element's evaluation point and p^S the zero-mean
/// sub-scale pressure of that element's cell solution.
class PressureReconstruction {
 public:
  PressureReconstruction(const macro::SolveReport& report, const mesh::ObstacleGrid& grid);

  /// Empty outside the Darcy block and inside obstacles of the cell.
  std::optional<double> at(const Vec2& x);
  /// Macro part only, for the element containing x.
  std::optional<double> affine_part(const Vec2& x) const;
  /// Cell coordinate of a physical point.
  Vec2 cell_coordinate(const Vec2& x) const;

 private:
  std::optional<mesh::Location> locate_darcy(const Vec2& x) const;

  const macro::SolveReport* report_;
  mesh::ObstacleGrid grid_;
  mesh::PointLocator locator_;
  std::map<int, std::shared_ptr<const micro::CellSolution>> cells_;
};

}  // namespace rebarflow::post
