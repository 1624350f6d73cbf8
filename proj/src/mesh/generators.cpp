#include "rebarflow/mesh/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rebarflow/mesh/planar_mesher.hpp"

namespace rebarflow::mesh {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOnSide = 1e-9;

Mat2 rotation(double angle) {
  Mat2 r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

// Incremental PSLG construction with exact-coordinate point sharing.
class Builder {
 public:
  Pslg g;

  int point(const Vec2& p) {
    auto [it, inserted] = index_.try_emplace({p.x(), p.y()}, static_cast<int>(g.points.size()));
    if (inserted) g.points.push_back(p);
    return it->second;
  }

  // Points from a to b (inclusive) equidistributing 1/h along the line.
  std::vector<Vec2> discretize(const Vec2& a, const Vec2& b) const {
    constexpr int kSamples = 512;
    const double len = (b - a).norm();
    std::vector<double> cum(kSamples + 1, 0.0);
    for (int i = 0; i < kSamples; ++i) {
      const Vec2 m = a + (i + 0.5) / kSamples * (b - a);
      cum[i + 1] = cum[i] + len / kSamples / g.sizing(m);
    }
    const int n = std::max(1, static_cast<int>(std::ceil(cum.back() - 1e-6)));
    std::vector<Vec2> pts{a};
    for (int k = 1; k < n; ++k) {
      const double target = cum.back() * k / n;
      const int i = static_cast<int>(std::lower_bound(cum.begin(), cum.end(), target) - cum.begin());
      const double t = (i - 1 + (target - cum[i - 1]) / (cum[i] - cum[i - 1])) / kSamples;
      pts.push_back(a + t * (b - a));
    }
    pts.push_back(b);
    return pts;
  }

  void add_polyline(const std::vector<Vec2>& pts, BoundaryTag tag, int circle = -1) {
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
      g.segments.push_back({point(pts[k]), point(pts[k + 1]), tag, circle, -1, Vec2::Zero()});
  }

  void add_line(const Vec2& a, const Vec2& b, BoundaryTag tag) { add_polyline(discretize(a, b), tag); }

  // Master side a->b and its translated copy, linked segment by segment.
  void add_periodic_line(const Vec2& a, const Vec2& b, const Vec2& shift) {
    const auto pts = discretize(a, b);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      const int s = static_cast<int>(g.segments.size());
      g.segments.push_back({point(pts[k]), point(pts[k + 1]), BoundaryTag::PeriodicMaster, -1, s + 1, shift});
      g.segments.push_back(
          {point(pts[k] + shift), point(pts[k + 1] + shift), BoundaryTag::PeriodicSlave, -1, s, Vec2(-shift)});
    }
  }

  void add_circle(const Disk& d, int n, double phase) {
    const int hole = static_cast<int>(g.holes.size());
    g.holes.push_back(d);
    std::vector<Vec2> pts;
    for (int k = 0; k <= n; ++k) {
      const double t = phase + 2.0 * kPi * (k % n) / n;
      pts.push_back(d.center + d.radius * Vec2(std::cos(t), std::sin(t)));
    }
    add_polyline(pts, BoundaryTag::Obstacle, hole);
  }

  // Rectangle sides with extra break points (kept as vertices).
  void add_rectangle(const Rectangle& r, const SideTags& tags, const std::vector<Vec2>& breaks) {
    const Vec2 c0(r.x0, r.y0), c1(r.x0 + r.width, r.y0), c2(r.x0 + r.width, r.y0 + r.height),
        c3(r.x0, r.y0 + r.height);
    const std::array<std::tuple<Vec2, Vec2, BoundaryTag>, 4> sides{
        {{c0, c1, tags.bottom}, {c1, c2, tags.right}, {c2, c3, tags.top}, {c3, c0, tags.left}}};
    for (const auto& [a, b, tag] : sides) {
      std::vector<std::pair<double, Vec2>> stops{{0.0, a}, {1.0, b}};
      const Vec2 d = b - a;
      for (const auto& p : breaks) {
        const double t = (p - a).dot(d) / d.squaredNorm();
        if (std::abs((p - a).x() * d.y() - (p - a).y() * d.x()) < kOnSide * d.norm() && t > 1e-12 && t < 1 - 1e-12)
          stops.emplace_back(t, p);
      }
      std::sort(stops.begin(), stops.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      for (std::size_t k = 0; k + 1 < stops.size(); ++k) add_line(stops[k].second, stops[k + 1].second, tag);
    }
  }

 private:
  std::map<std::pair<double, double>, int> index_;
};

// Nearest point on the rectangle boundary when p is within kOnSide of it.
Vec2 snap_to_rectangle(Vec2 p, const Rectangle& r) {
  auto snap = [](double v, double edge) { return std::abs(v - edge) < kOnSide ? edge : v; };
  p.x() = snap(snap(p.x(), r.x0), r.x0 + r.width);
  p.y() = snap(snap(p.y(), r.y0), r.y0 + r.height);
  return p;
}

bool both_on_same_side(const Vec2& a, const Vec2& b, const Rectangle& r) {
  return (a.y() == r.y0 && b.y() == r.y0) || (a.y() == r.y0 + r.height && b.y() == r.y0 + r.height) ||
         (a.x() == r.x0 && b.x() == r.x0) || (a.x() == r.x0 + r.width && b.x() == r.x0 + r.width);
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw MeshError(std::string(what) + " must be positive");
}

}  // namespace

int circle_segments(double r, double h) {
  int n = std::max(16, static_cast<int>(std::ceil(2.0 * kPi * r / h - 1e-9)));
  return (n + 7) / 8 * 8;
}

Vec2 ObstacleGrid::center() const { return origin + 0.5 * cell_size * Vec2(cols, rows); }

Vec2 ObstacleGrid::to_physical(const Vec2& p) const {
  if (rotation_angle == 0.0) return p;
  return center() + rotation(rotation_angle) * (p - center());
}

Vec2 ObstacleGrid::to_grid(const Vec2& x) const {
  if (rotation_angle == 0.0) return x;
  return center() + rotation(-rotation_angle) * (x - center());
}

Vec2 ObstacleGrid::obstacle_center(int row, int col) const {
  return to_physical(origin + cell_size * Vec2(col + 0.5, row + 0.5));
}

std::vector<Disk> ObstacleGrid::obstacles() const {
  std::vector<Disk> out;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.push_back({obstacle_center(r, c), radius});
  return out;
}

std::vector<Vec2> ObstacleGrid::outline() const {
  const double w = cols * cell_size, h = rows * cell_size;
  return {to_physical(origin), to_physical(origin + Vec2(w, 0.0)), to_physical(origin + Vec2(w, h)),
          to_physical(origin + Vec2(0.0, h))};
}

void ObstacleGrid::validate(const Rectangle& outer) const {
  if (rows < 1 || cols < 1) throw MeshError("obstacle grid needs at least one row and column");
  check_positive(cell_size, "cell size");
  check_positive(radius, "obstacle radius");
  if (radius >= 0.5 * cell_size) throw MeshError("obstacle intersects cell boundary");
  for (const auto& p : outline()) {
    if (p.x() < outer.x0 - kOnSide || p.x() > outer.x0 + outer.width + kOnSide || p.y() < outer.y0 - kOnSide ||
        p.y() > outer.y0 + outer.height + kOnSide)
      throw MeshError("obstacle grid is not contained in the domain");
  }
}

Mesh generate_rectangle_mesh(double width, double height, double target_h, const SideTags& tags) {
  check_positive(width, "width");
  check_positive(height, "height");
  check_positive(target_h, "target element size");
  const int nx = std::max(1, static_cast<int>(std::ceil(width / target_h - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil(height / target_h - 1e-9)));
  if (static_cast<long long>(nx + 1) * (ny + 1) > 50'000'000) throw MeshError("rectangle mesh too large");

  Mesh mesh;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes.emplace_back(i == nx ? width : width * i / nx, j == ny ? height : height * j / ny);
  mesh.num_vertices = static_cast<int>(mesh.nodes.size());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Triangle a, b;
      a.nodes[0] = id(i, j);
      a.nodes[1] = id(i + 1, j);
      a.nodes[2] = id(i + 1, j + 1);
      b.nodes[0] = id(i, j);
      b.nodes[1] = id(i + 1, j + 1);
      b.nodes[2] = id(i, j + 1);
      mesh.triangles.push_back(a);
      mesh.triangles.push_back(b);
    }
  }
  for (int i = 0; i < nx; ++i) {
    mesh.edges.push_back({id(i, 0), id(i + 1, 0), -1, tags.bottom});
    mesh.edges.push_back({id(i + 1, ny), id(i, ny), -1, tags.top});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.edges.push_back({id(nx, j), id(nx, j + 1), -1, tags.right});
    mesh.edges.push_back({id(0, j + 1), id(0, j), -1, tags.left});
  }
  return mesh;
}

Mesh generate_perforated_mesh(const Rectangle& outer, const ObstacleGrid& grid, const MeshSizing& sizing,
                              const SideTags& tags) {
  check_positive(outer.width, "width");
  check_positive(outer.height, "height");
  check_positive(sizing.target_h, "target element size");
  grid.validate(outer);

  const auto disks = grid.obstacles();
  const int n = circle_segments(grid.radius, sizing.near_h > 0.0 ? sizing.near_h : sizing.target_h);
  const double h_near = 2.0 * grid.radius * std::sin(kPi / n);
  const double h_far = sizing.target_h;
  const double grading = sizing.grading;

  Builder b;
  b.g.h_max = h_far;
  b.g.sizing = [disks, h_near, h_far, grading](const Vec2& p) {
    double d = std::numeric_limits<double>::max();
    for (const auto& disk : disks) d = std::min(d, (p - disk.center).norm() - disk.radius);
    return std::min(h_far, h_near + grading * std::max(0.0, d));
  };
  b.add_rectangle(outer, tags, {});
  for (const auto& d : disks) b.add_circle(d, n, grid.rotation_angle);
  Mesh mesh = triangulate_pslg(std::move(b.g));
  mesh.darcy_block = grid.outline();
  return mesh;
}

Mesh generate_homogenized_mesh(const Rectangle& outer, const ObstacleGrid& block, double target_h,
                               const SideTags& tags) {
  check_positive(outer.width, "width");
  check_positive(outer.height, "height");
  check_positive(target_h, "target element size");
  block.validate(outer);

  std::vector<Vec2> outline = block.outline();
  for (auto& p : outline) p = snap_to_rectangle(p, outer);

  Builder b;
  b.g.h_max = target_h;
  b.g.sizing = [target_h](const Vec2&) { return target_h; };
  b.add_rectangle(outer, tags, outline);
  for (std::size_t k = 0; k < outline.size(); ++k) {
    const Vec2& p = outline[k];
    const Vec2& q = outline[(k + 1) % outline.size()];
    if (both_on_same_side(p, q, outer)) continue;
    b.add_line(p, q, BoundaryTag::Interface);
  }
  b.g.zones.push_back({outline, Region::Darcy});
  Mesh mesh = triangulate_pslg(std::move(b.g));
  mesh.darcy_block = outline;
  return mesh;
}

Mesh generate_rve_mesh(double xi, double target_h) {
  check_positive(xi, "obstacle radius");
  check_positive(target_h, "target element size");
  if (xi >= 0.5) throw MeshError("obstacle intersects cell boundary");

  // Mesh one eighth of the cell (0 <= v <= u <= 1/2 around the centre) and
  // reflect it, so the cell mesh has the full square symmetry.
  const int n = circle_segments(xi, target_h);
  const int n8 = n / 8;
  Builder b;
  b.g.h_max = target_h;
  b.g.sizing = [target_h](const Vec2&) { return target_h; };
  b.g.insert_hole_centers = false;
  b.g.holes.push_back({Vec2::Zero(), xi});
  std::vector<Vec2> arc;
  for (int k = 0; k <= n8; ++k) {
    const double t = 2.0 * kPi * k / n;
    arc.push_back(k == 0 ? Vec2(xi, 0.0) : xi * Vec2(std::cos(t), std::sin(t)));
  }
  const Vec2 diag_end = arc.back();
  b.add_polyline(arc, BoundaryTag::Obstacle, 0);
  b.add_line(Vec2(xi, 0.0), Vec2(0.5, 0.0), BoundaryTag::Interface);
  b.add_line(Vec2(0.5, 0.0), Vec2(0.5, 0.5), BoundaryTag::PeriodicSlave);
  b.add_line(diag_end, Vec2(0.5, 0.5), BoundaryTag::Interface);
  std::vector<Vec2> domain{Vec2(xi, 0.0), Vec2(0.5, 0.0), Vec2(0.5, 0.5)};
  for (int k = n8; k >= 0; --k) domain.push_back(arc[k]);
  b.g.domain = domain;
  Mesh wedge = triangulate_pslg(std::move(b.g));
  // Snap seam nodes so that reflected copies coincide bit for bit.
  for (auto& p : wedge.nodes) {
    if (std::abs(p.x() - p.y()) < 1e-12) p.x() = p.y() = 0.5 * (p.x() + p.y());
    if (std::abs(p.y()) < 1e-12) p.y() = 0.0;
  }

  // Eight images: (u, v), (v, u) and their sign flips.
  Mesh mesh;
  std::map<std::pair<double, double>, int> index;
  auto node = [&](const Vec2& p) {
    auto [it, inserted] = index.try_emplace({p.x(), p.y()}, static_cast<int>(mesh.nodes.size()));
    if (inserted) mesh.nodes.push_back(p);
    return it->second;
  };
  for (int swap = 0; swap < 2; ++swap) {
    for (int sx = -1; sx <= 1; sx += 2) {
      for (int sy = -1; sy <= 1; sy += 2) {
        auto map = [&](const Vec2& p) {
          const Vec2 q = swap ? Vec2(p.y(), p.x()) : p;
          return Vec2(sx * q.x(), sy * q.y());
        };
        const bool flips = (swap ? -1 : 1) * sx * sy < 0;
        for (const auto& t : wedge.triangles) {
          Triangle tri;
          tri.region = Region::RveFluid;
          for (int k = 0; k < 3; ++k) tri.nodes[k] = node(map(wedge.nodes[t.nodes[k]]));
          if (flips) std::swap(tri.nodes[1], tri.nodes[2]);
          mesh.triangles.push_back(tri);
        }
      }
    }
  }
  for (auto& p : mesh.nodes) p += Vec2(0.5, 0.5);
  mesh.num_vertices = static_cast<int>(mesh.nodes.size());

  // Boundary edges are edges with a single adjacent triangle.
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const int a = t.nodes[k], c = t.nodes[(k + 1) % 3];
      ++count[{std::min(a, c), std::max(a, c)}];
    }
  for (const auto& [e, c] : count) {
    if (c != 1) continue;
    const Vec2& p = mesh.nodes[e.first];
    const Vec2& q = mesh.nodes[e.second];
    BoundaryTag tag = BoundaryTag::Obstacle;
    if (p.x() == 0.0 && q.x() == 0.0) tag = BoundaryTag::PeriodicMaster;
    else if (p.y() == 0.0 && q.y() == 0.0) tag = BoundaryTag::PeriodicMaster;
    else if (p.x() == 1.0 && q.x() == 1.0) tag = BoundaryTag::PeriodicSlave;
    else if (p.y() == 1.0 && q.y() == 1.0) tag = BoundaryTag::PeriodicSlave;
    const Vec2 centre(0.5, 0.5);
    if (tag == BoundaryTag::Obstacle &&
        (std::abs((p - centre).norm() - xi) > 1e-9 || std::abs((q - centre).norm() - xi) > 1e-9))
      throw MeshError("cell mesh has an open seam");
    mesh.edges.push_back({e.first, e.second, -1, tag});
  }
  std::map<double, int> left, bottom;
  for (int v = 0; v < mesh.num_vertices; ++v) {
    if (mesh.nodes[v].x() == 0.0) left[mesh.nodes[v].y()] = v;
    if (mesh.nodes[v].y() == 0.0) bottom[mesh.nodes[v].x()] = v;
  }
  for (int v = 0; v < mesh.num_vertices; ++v) {
    const Vec2& p = mesh.nodes[v];
    if (p.x() == 1.0) {
      auto it = left.find(p.y());
      if (it == left.end()) throw MeshError("periodic cell sides do not match");
      mesh.periodic.push_back({it->second, v, Vec2(1.0, 0.0)});
    }
    if (p.y() == 1.0) {
      auto it = bottom.find(p.x());
      if (it == bottom.end()) throw MeshError("periodic cell sides do not match");
      mesh.periodic.push_back({it->second, v, Vec2(0.0, 1.0)});
    }
  }
  mesh.obstacles.push_back({Vec2(0.5, 0.5), xi});
  return mesh;
}

Mesh generate_boundary_layer_mesh(double xi, int free_cells, double target_h) {
  // xi = 0 gives an unobstructed stack, the reference for the channel limit.
  if (!(xi >= 0.0)) throw MeshError("obstacle radius must be non-negative");
  check_positive(target_h, "target element size");
  if (free_cells < 1) throw MeshError("boundary layer needs at least one free cell");
  if (xi >= 0.5) throw MeshError("obstacle intersects cell boundary");

  const double top = 1.0 + free_cells;
  const Vec2 c(0.5, 0.5);
  Builder b;
  b.g.h_max = target_h;
  if (xi > 0.0) {
    const int n = circle_segments(xi, target_h);
    const double h_near = 2.0 * xi * std::sin(kPi / n);
    b.g.sizing = [c, xi, h_near, target_h](const Vec2& p) {
      return std::min(target_h, h_near + 0.3 * std::max(0.0, (p - c).norm() - xi));
    };
  } else {
    b.g.sizing = [target_h](const Vec2&) { return target_h; };
  }
  b.add_line(Vec2(0.0, 0.0), Vec2(1.0, 0.0), BoundaryTag::BlBottom);
  b.add_line(Vec2(1.0, top), Vec2(0.0, top), BoundaryTag::BlTop);
  b.add_periodic_line(Vec2(0.0, 0.0), Vec2(0.0, 1.0), Vec2(1.0, 0.0));
  b.add_periodic_line(Vec2(0.0, 1.0), Vec2(0.0, top), Vec2(1.0, 0.0));
  b.add_line(Vec2(0.0, 1.0), Vec2(1.0, 1.0), BoundaryTag::Interface);
  if (xi > 0.0) b.add_circle({c, xi}, circle_segments(xi, target_h), 0.0);
  b.g.zones.push_back({{Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(1.0, 1.0), Vec2(0.0, 1.0)}, Region::RveFluid});
  return triangulate_pslg(std::move(b.g));
}

}  // namespace rebarflow::mesh
