#include "rebarflow/mesh/planar_mesher.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "rebarflow/mesh/delaunay.hpp"

namespace rebarflow::mesh {

namespace {

constexpr int kMaxRecoveryRounds = 60;
constexpr double kSegmentClearance = 0.6;

long long edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b);
}

double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

bool inside_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

// Uniform bucket grid over segments for clearance queries.
class SegmentGrid {
 public:
  SegmentGrid(const Pslg& g, const Vec2& lo, const Vec2& hi) : g_(g), lo_(lo) {
    double longest = 0.0;
    for (const auto& s : g.segments) longest = std::max(longest, (g.points[s.b] - g.points[s.a]).norm());
    cell_ = std::max(longest, 1e-3 * std::max(hi.x() - lo.x(), hi.y() - lo.y()));
    nx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / cell_)));
    buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (int s = 0; s < static_cast<int>(g.segments.size()); ++s) {
      const Vec2& a = g.points[g.segments[s].a];
      const Vec2& b = g.points[g.segments[s].b];
      const auto [i0, j0] = bucket(a.cwiseMin(b));
      const auto [i1, j1] = bucket(a.cwiseMax(b));
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) buckets_[j * nx_ + i].push_back(s);
    }
  }

  // True when p keeps the required clearance from every segment.
  bool clear(const Vec2& p) const {
    const auto [ci, cj] = bucket(p);
    for (int j = std::max(0, cj - 1); j <= std::min(ny_ - 1, cj + 1); ++j) {
      for (int i = std::max(0, ci - 1); i <= std::min(nx_ - 1, ci + 1); ++i) {
        for (int s : buckets_[j * nx_ + i]) {
          const Vec2& a = g_.points[g_.segments[s].a];
          const Vec2& b = g_.points[g_.segments[s].b];
          if (distance_to_segment(p, a, b) < kSegmentClearance * (b - a).norm()) return false;
        }
      }
    }
    return true;
  }

 private:
  std::pair<int, int> bucket(const Vec2& p) const {
    const int i = std::clamp(static_cast<int>((p.x() - lo_.x()) / cell_), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>((p.y() - lo_.y()) / cell_), 0, ny_ - 1);
    return {i, j};
  }

  const Pslg& g_;
  Vec2 lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

bool inside_hole(const Pslg& g, const Vec2& p, double margin) {
  for (const auto& h : g.holes)
    if ((p - h.center).norm() < h.radius + margin) return true;
  return false;
}

std::vector<Vec2> interior_points(const Pslg& g, const Vec2& lo, const Vec2& hi) {
  SegmentGrid grid(g, lo, hi);
  std::vector<Vec2> out;
  const double w = hi.x() - lo.x(), h = hi.y() - lo.y();
  const int nx = std::max(1, static_cast<int>(std::ceil(w / g.h_max - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil(h / g.h_max - 1e-9)));

  auto refine = [&](auto&& self, double x0, double y0, double cw, double ch, int depth) -> void {
    const Vec2 c(x0 + 0.5 * cw, y0 + 0.5 * ch);
    const double hc = g.sizing(c);
    if (std::max(cw, ch) > hc * 1.0001 && depth < 16) {
      for (int q = 0; q < 4; ++q) self(self, x0 + 0.5 * cw * (q % 2), y0 + 0.5 * ch * (q / 2), 0.5 * cw, 0.5 * ch, depth + 1);
      return;
    }
    if (inside_hole(g, c, 0.1 * hc)) return;
    if (!g.domain.empty() && !inside_polygon(c, g.domain)) return;
    if (!grid.clear(c)) return;
    out.push_back(c);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) refine(refine, lo.x() + i * w / nx, lo.y() + j * h / ny, w / nx, h / ny, 0);
  return out;
}

// Splits segment s (and its periodic partner) at its midpoint.
void split_segment(Pslg& g, int s) {
  auto midpoint = [&](const PslgSegment& seg) {
    Vec2 m = 0.5 * (g.points[seg.a] + g.points[seg.b]);
    if (seg.circle >= 0) {
      const Disk& d = g.holes[seg.circle];
      m = d.center + d.radius * (m - d.center).normalized();
    }
    return m;
  };
  const Vec2 m = midpoint(g.segments[s]);
  const int im = static_cast<int>(g.points.size());
  g.points.push_back(m);
  PslgSegment second = g.segments[s];
  second.a = im;
  g.segments[s].b = im;
  const int s2 = static_cast<int>(g.segments.size());
  g.segments.push_back(second);

  const int q = g.segments[s].partner;
  if (q < 0) return;
  const int iq = static_cast<int>(g.points.size());
  g.points.push_back(m + g.segments[s].shift);
  PslgSegment qsecond = g.segments[q];
  qsecond.a = iq;
  g.segments[q].b = iq;
  const int q2 = static_cast<int>(g.segments.size());
  qsecond.partner = s2;
  g.segments.push_back(qsecond);
  g.segments[s2].partner = q2;
}

void smooth(std::vector<Vec2>& pts, const std::vector<std::array<int, 3>>& tris, const std::vector<bool>& fixed,
            const Pslg& g, int sweeps) {
  const std::size_t n = pts.size();
  std::vector<std::vector<int>> incident(n);
  std::vector<std::set<int>> nbrs(n);
  for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
    for (int k = 0; k < 3; ++k) {
      incident[tris[t][k]].push_back(t);
      nbrs[tris[t][k]].insert(tris[t][(k + 1) % 3]);
      nbrs[tris[t][k]].insert(tris[t][(k + 2) % 3]);
    }
  }
  auto area2 = [&](const std::array<int, 3>& t) { return cross(pts[t[1]] - pts[t[0]], pts[t[2]] - pts[t[0]]); };
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t v = 0; v < n; ++v) {
      if (fixed[v] || nbrs[v].empty()) continue;
      Vec2 target = Vec2::Zero();
      for (int u : nbrs[v]) target += pts[u];
      target /= static_cast<double>(nbrs[v].size());
      const Vec2 old = pts[v];
      double min_old = std::numeric_limits<double>::max();
      for (int t : incident[v]) min_old = std::min(min_old, area2(tris[t]));
      pts[v] = target;
      bool ok = !inside_hole(g, target, 0.0);
      for (int t : incident[v]) ok = ok && area2(tris[t]) > 1e-3 * min_old;
      if (!ok) pts[v] = old;
    }
  }
}

}  // namespace

Mesh triangulate_pslg(Pslg g) {
  if (g.points.size() < 3 || g.segments.empty()) throw MeshError("empty geometry");
  if (!g.sizing) throw MeshError("no sizing function");

  Vec2 lo = g.points.front(), hi = g.points.front();
  for (const auto& p : g.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  std::vector<Vec2> interior = interior_points(g, lo, hi);

  std::vector<Vec2> all;
  std::vector<std::array<int, 3>> tris;
  int n_boundary = 0, n_interior = 0;
  for (int round = 0;; ++round) {
    n_boundary = static_cast<int>(g.points.size());
    n_interior = static_cast<int>(interior.size());
    all = g.points;
    all.insert(all.end(), interior.begin(), interior.end());
    if (g.insert_hole_centers)
      for (const auto& h : g.holes) all.push_back(h.center);
    tris = delaunay_triangulate(all);

    std::unordered_set<long long> present;
    present.reserve(tris.size() * 3);
    for (const auto& t : tris)
      for (int k = 0; k < 3; ++k) present.insert(edge_key(t[k], t[(k + 1) % 3]));
    std::vector<int> missing;
    for (int s = 0; s < static_cast<int>(g.segments.size()); ++s)
      if (!present.count(edge_key(g.segments[s].a, g.segments[s].b))) missing.push_back(s);
    if (missing.empty()) break;
    if (round == kMaxRecoveryRounds) throw MeshError("segment recovery did not terminate");

    // Free points inside a missing segment's diametral disk are dropped;
    // otherwise the segment is split.
    std::vector<bool> drop(interior.size(), false);
    std::vector<bool> touched(g.segments.size(), false);
    std::vector<int> to_split;
    for (int s : missing) {
      const Vec2& a = g.points[g.segments[s].a];
      const Vec2& b = g.points[g.segments[s].b];
      const Vec2 mid = 0.5 * (a + b);
      const double r = 0.5 * (b - a).norm() * (1.0 + 1e-9);
      bool any = false;
      for (std::size_t i = 0; i < interior.size(); ++i) {
        if ((interior[i] - mid).norm() < r) {
          drop[i] = true;
          any = true;
        }
      }
      if (any) continue;
      const int q = g.segments[s].partner;
      if (touched[s] || (q >= 0 && touched[q])) continue;
      touched[s] = true;
      if (q >= 0) touched[q] = true;
      to_split.push_back(s);
    }
    for (int s : to_split) {
      // Split through the master side so both copies stay identical.
      const int q = g.segments[s].partner;
      split_segment(g, (q >= 0 && g.segments[s].tag == BoundaryTag::PeriodicSlave) ? q : s);
    }
    std::vector<Vec2> kept;
    kept.reserve(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i)
      if (!drop[i]) kept.push_back(interior[i]);
    interior.swap(kept);
  }

  // Discard hole triangles: those touching a hole centre or centred inside a hole.
  const int first_center = n_boundary + n_interior;
  std::vector<std::array<int, 3>> kept_tris;
  std::vector<Region> regions;
  for (const auto& t : tris) {
    if (t[0] >= first_center || t[1] >= first_center || t[2] >= first_center) continue;
    const Vec2 c = (all[t[0]] + all[t[1]] + all[t[2]]) / 3.0;
    if (inside_hole(g, c, 0.0)) continue;
    if (!g.domain.empty() && !inside_polygon(c, g.domain)) continue;
    Region region = g.default_region;
    for (const auto& z : g.zones) {
      if (inside_polygon(c, z.polygon)) {
        region = z.region;
        break;
      }
    }
    kept_tris.push_back(t);
    regions.push_back(region);
  }

  std::vector<int> remap(all.size(), -1);
  std::vector<Vec2> pts;
  for (auto& t : kept_tris) {
    for (int& v : t) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(pts.size());
        pts.push_back(all[v]);
      }
      v = remap[v];
    }
  }
  std::vector<bool> fixed(pts.size(), false);
  for (int i = 0; i < n_boundary; ++i) {
    if (remap[i] < 0) throw MeshError("boundary point dropped from triangulation");
    fixed[remap[i]] = true;
  }
  smooth(pts, kept_tris, fixed, g, g.smoothing_sweeps);

  Mesh mesh;
  mesh.nodes = std::move(pts);
  mesh.num_vertices = static_cast<int>(mesh.nodes.size());
  mesh.triangles.reserve(kept_tris.size());
  for (std::size_t t = 0; t < kept_tris.size(); ++t) {
    Triangle tri;
    std::copy(kept_tris[t].begin(), kept_tris[t].end(), tri.nodes.begin());
    tri.region = regions[t];
    mesh.triangles.push_back(tri);
  }
  for (const auto& s : g.segments) mesh.edges.push_back({remap[s.a], remap[s.b], -1, s.tag});

  std::set<std::pair<int, int>> paired;
  for (const auto& s : g.segments) {
    if (s.partner < 0 || s.tag == BoundaryTag::PeriodicSlave) continue;
    const auto& q = g.segments[s.partner];
    for (auto [m, sl] : {std::pair{s.a, q.a}, std::pair{s.b, q.b}}) {
      if (paired.insert({remap[m], remap[sl]}).second) mesh.periodic.push_back({remap[m], remap[sl], s.shift});
    }
  }
  mesh.obstacles = g.holes;
  return mesh;
}

}  // namespace rebarflow::mesh
