#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rebarflow/post/config.hpp"
#include "rebarflow/post/fields.hpp"

namespace rebarflow::post {

/// A finished run: its configuration and fields.
struct RunData {
  RunConfig config;
  FieldSet fields;
};

/// Reads scenario.ini, mesh.txt, fields.csv and (if present) darcy_fields.csv.
RunData load_run(const std::string& directory);

struct Section {
  std::string name;
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  int samples = 200;
};

/// One section per line, "name x0 y0 x1 y1 [samples]"; '#' starts a comment.
std::vector<Section> read_sections(const std::string& path);
/// Horizontal line through the block centre across the whole domain and the
/// vertical line through the centre of the third obstacle column.
std::vector<Section> default_sections(const macro::Scenario& s);

struct CompareOptions {
  int footprint_samples = 200;  // per cell and direction
  int midline_samples = 400;
};

struct Metrics {
  /// max over footprints |<u>_ref - <u>_test| / max over footprints |<u>_ref|
  double velocity_error = 0.0;
  /// |s_ref - s_test| / |s_ref| for the fitted midline slope inside the block
  double gradient_error = 0.0;
  double reference_slope = 0.0;
  double test_slope = 0.0;
  /// per section: max |p_ref - p_test| / max |p_ref|
  std::vector<std::pair<std::string, double>> pressure_errors;
  double pressure_error = 0.0;  // max over sections
  /// max over reference vertices |p_ref - p_test| / max |p_ref|
  double pressure_field_error = 0.0;

  std::string format() const;
};

/// Throws ConfigError when the two runs differ in domain or obstacle grid.
void check_same_geometry(const macro::Scenario& a, const macro::Scenario& b);

/// Average of the velocity over each cell footprint, zero inside obstacles,
/// row-major over the grid.
std::vector<Vec2> footprint_averages(const FieldSampler& f, const mesh::ObstacleGrid& grid, int samples);

/// Least-squares slope of the pressure along the block's horizontal midline
/// (grid frame), restricted to the block.
double midline_slope(const FieldSampler& f, const mesh::ObstacleGrid& grid, int samples);

/// Pressure difference at the reference mesh vertices, relative to max |p_ref|.
double pressure_field_error(const FieldSet& reference, const FieldSampler& test);

Metrics compare(const RunData& reference, const RunData& test, std::span<const Section> sections,
                const CompareOptions& options = {});

struct SweepOptions {
  int samples = 200;
  double band_cells = 1.0;  // band width around the interface in cells
  double dns_target_h = 0.0;  // DNS mesh size, scenario target_h when <= 0
};

struct SweepResult {
  std::vector<double> betas;
  std::vector<double> mismatch;
  double best = 0.0;
};

/// max |u_t,ref - u_t,test| over the vertical section through the third
/// column, restricted to the fluid-side bands of width band_cells * L above
/// and below the block (grid frame).
double interface_mismatch(const FieldSampler& reference, const FieldSampler& test, const mesh::ObstacleGrid& grid,
                          const SweepOptions& options = {});

/// Index of the smallest entry, first one on ties.
std::size_t argmin(std::span<const double> values);

/// One DNS solve of the scenario, then one homogenized solve per beta.
SweepResult beta_sweep(const macro::Scenario& scenario, std::span<const double> betas,
                       const SweepOptions& options = {});

}  // namespace rebarflow::post
