#include "rebarflow/fem/dof_map.hpp"

#include <cmath>
#include <string>

namespace rebarflow::fem {

namespace {

struct Basis {
  std::vector<Vec2> fixed_dir;
  std::vector<double> fixed_val;
  std::vector<Vec2> free;
};

Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

/// Orthonormalizes node constraints dir . u = value and completes the basis.
/// `preferred` (unit) orients the free basis when nothing is constrained.
template <class Cons>
Basis build_basis(const Cons& cons, const Vec2& preferred, int node) {
  Basis b;
  for (const auto& c : cons) {
    Vec2 d = c.dir;
    double v = c.value;
    const double scale = d.norm();
    if (!(scale > 0.0)) throw SolverError("zero constraint direction at node " + std::to_string(node));
    for (std::size_t k = 0; k < b.fixed_dir.size(); ++k) {
      const double proj = d.dot(b.fixed_dir[k]);
      d -= proj * b.fixed_dir[k];
      v -= proj * b.fixed_val[k];
    }
    const double len = d.norm();
    if (len <= 1e-10 * scale) {
      if (std::abs(v) > 1e-10 * std::max(1.0, std::abs(c.value)))
        throw SolverError("inconsistent velocity constraints at node " + std::to_string(node));
      continue;
    }
    b.fixed_dir.push_back(d / len);
    b.fixed_val.push_back(v / len);
  }
  if (b.fixed_dir.empty()) {
    b.free = {preferred, perp(preferred)};
  } else if (b.fixed_dir.size() == 1) {
    b.free = {perp(b.fixed_dir[0])};
  }
  return b;
}

}  // namespace

DofMap::DofMap(const mesh::Mesh& mesh) : mesh_(&mesh), num_vertices_(mesh.num_vertices) {
  if (!mesh.is_p2()) throw MeshError("DofMap requires a P2 mesh");
  const int n = mesh.num_nodes();
  std::vector<char> stokes(n, 0), darcy(n, 0);
  for (const auto& t : mesh.triangles) {
    auto& flag = t.region == mesh::Region::Darcy ? darcy : stokes;
    for (int v : t.nodes) flag[v] = 1;
  }
  velocity_.assign(n, -1);
  darcy_velocity_.assign(n, -1);
  pressure_.assign(num_vertices_, -1);
  darcy_pressure_.assign(num_vertices_, -1);
  for (int i = 0; i < n; ++i) {
    if (stokes[i]) {
      velocity_[i] = num_raw_;
      num_raw_ += 2;
      raw_field_.insert(raw_field_.end(), 2, Field::Velocity);
    }
    if (darcy[i]) {
      darcy_velocity_[i] = num_raw_;
      num_raw_ += 2;
      raw_field_.insert(raw_field_.end(), 2, Field::DarcyVelocity);
    }
  }
  for (int i = 0; i < num_vertices_; ++i) {
    if (stokes[i]) {
      pressure_[i] = num_raw_++;
      raw_field_.push_back(Field::Pressure);
    }
    if (darcy[i]) {
      darcy_pressure_[i] = num_raw_++;
      raw_field_.push_back(Field::DarcyPressure);
    }
  }
  u_cons_.resize(n);
  ubar_cons_.resize(n);
  normal_.assign(n, Vec2::Zero());
  p_pin_.assign(num_vertices_, 0.0);
  pbar_pin_.assign(num_vertices_, 0.0);
  p_pinned_.assign(num_vertices_, 0);
  pbar_pinned_.assign(num_vertices_, 0);
  parent_.resize(n);
  for (int i = 0; i < n; ++i) parent_[i] = i;
}

int DofMap::find(int node) const {
  while (parent_[node] != node) {
    parent_[node] = parent_[parent_[node]];
    node = parent_[node];
  }
  return node;
}

void DofMap::prescribe_velocity(int node, const Vec2& dir, double value) {
  if (finalized_) throw SolverError("DofMap already finalized");
  if (!has_stokes(node)) throw SolverError("velocity constraint on node without Stokes field: " + std::to_string(node));
  u_cons_[node].push_back({dir, value});
}

void DofMap::prescribe_darcy_velocity(int node, const Vec2& dir, double value) {
  if (finalized_) throw SolverError("DofMap already finalized");
  if (!has_darcy(node)) throw SolverError("Darcy constraint on node without Darcy field: " + std::to_string(node));
  ubar_cons_[node].push_back({dir, value});
}

void DofMap::fix_velocity(int node, const Vec2& value) {
  prescribe_velocity(node, Vec2::UnitX(), value.x());
  prescribe_velocity(node, Vec2::UnitY(), value.y());
}

void DofMap::couple_interface(int node, const Vec2& normal) {
  if (finalized_) throw SolverError("DofMap already finalized");
  if (!has_stokes(node) || !has_darcy(node))
    throw SolverError("interface node without both fields: " + std::to_string(node));
  const double len = normal.norm();
  if (!(len > 0.0)) throw SolverError("zero interface normal at node " + std::to_string(node));
  normal_[node] = normal / len;
}

void DofMap::make_periodic(int master, int slave) {
  if (finalized_) throw SolverError("DofMap already finalized");
  if (has_stokes(master) != has_stokes(slave) || has_darcy(master) != has_darcy(slave))
    throw SolverError("periodic pair with mismatched fields");
  const int a = find(master), b = find(slave);
  if (a == b) return;
  // Keep the smaller root so the result does not depend on insertion order.
  if (a < b) parent_[b] = a;
  else parent_[a] = b;
}

void DofMap::pin_pressure(int vertex, double value) {
  if (pressure(vertex) < 0) throw SolverError("pressure pin on vertex without pressure");
  p_pinned_[vertex] = 1;
  p_pin_[vertex] = value;
}

void DofMap::pin_darcy_pressure(int vertex, double value) {
  if (darcy_pressure(vertex) < 0) throw SolverError("Darcy pressure pin on vertex without Darcy pressure");
  pbar_pinned_[vertex] = 1;
  pbar_pin_[vertex] = value;
}

void DofMap::finalize() {
  if (finalized_) return;
  const int n = mesh_->num_nodes();

  std::vector<std::vector<int>> members(n);
  for (int i = 0; i < n; ++i) members[find(i)].push_back(i);

  std::vector<std::vector<Term>> exp(num_raw_);
  offset_.assign(num_raw_, 0.0);

  auto add_reduced = [&](Field f, int source, const Vec2& dir) {
    reduced_field_.push_back(f);
    reduce_source_.push_back(source);
    reduce_dir_.push_back(dir);
    return num_reduced_++;
  };

  for (int root = 0; root < n; ++root) {
    if (members[root].empty() || find(root) != root) continue;
    const auto& group = members[root];

    if (has_stokes(root)) {
      std::vector<NodeConstraint> cons;
      Vec2 normal = Vec2::Zero();
      for (int m : group) {
        cons.insert(cons.end(), u_cons_[m].begin(), u_cons_[m].end());
        if (normal_[m].squaredNorm() > 0.0) normal = normal_[m];
      }
      const bool coupled = normal.squaredNorm() > 0.0;
      const Basis b = build_basis(cons, coupled ? normal : Vec2::UnitX(), root);
      std::vector<int> ids;
      for (const Vec2& f : b.free) ids.push_back(add_reduced(Field::Velocity, velocity(root, 0), f));
      Vec2 lift = Vec2::Zero();
      for (std::size_t k = 0; k < b.fixed_dir.size(); ++k) lift += b.fixed_val[k] * b.fixed_dir[k];

      for (int m : group) {
        for (int a = 0; a < 2; ++a) {
          const int raw = velocity(m, a);
          for (std::size_t j = 0; j < ids.size(); ++j)
            if (b.free[j][a] != 0.0) exp[raw].push_back({ids[j], b.free[j][a]});
          offset_[raw] = lift[a];
        }
      }

      if (coupled) {
        if (!has_darcy(root)) throw SolverError("interface node without Darcy field: " + std::to_string(root));
        // Darcy constraints at coupled nodes are implied by the tie and ignored.
        for (int m : group) {
          for (int a = 0; a < 2; ++a) {
            const int raw = darcy_velocity(m, a);
            for (std::size_t j = 0; j < ids.size(); ++j) {
              const double c = normal[a] * normal.dot(b.free[j]);
              if (c != 0.0) exp[raw].push_back({ids[j], c});
            }
            offset_[raw] = normal[a] * normal.dot(lift);
          }
        }
      }
    }

    const bool darcy_coupled = has_stokes(root) && [&] {
      for (int m : group)
        if (normal_[m].squaredNorm() > 0.0) return true;
      return false;
    }();
    if (has_darcy(root) && !darcy_coupled) {
      std::vector<NodeConstraint> cons;
      for (int m : group) cons.insert(cons.end(), ubar_cons_[m].begin(), ubar_cons_[m].end());
      const Basis b = build_basis(cons, Vec2::UnitX(), root);
      std::vector<int> ids;
      for (const Vec2& f : b.free) ids.push_back(add_reduced(Field::DarcyVelocity, darcy_velocity(root, 0), f));
      Vec2 lift = Vec2::Zero();
      for (std::size_t k = 0; k < b.fixed_dir.size(); ++k) lift += b.fixed_val[k] * b.fixed_dir[k];
      for (int m : group) {
        for (int a = 0; a < 2; ++a) {
          const int raw = darcy_velocity(m, a);
          for (std::size_t j = 0; j < ids.size(); ++j)
            if (b.free[j][a] != 0.0) exp[raw].push_back({ids[j], b.free[j][a]});
          offset_[raw] = lift[a];
        }
      }
    }
  }

  auto scalar_field = [&](Field f, auto index, const std::vector<char>& pinned, const std::vector<double>& pin) {
    for (int root = 0; root < num_vertices_; ++root) {
      if (index(root) < 0 || find(root) != root) continue;
      bool is_pinned = false;
      double value = 0.0;
      for (int m : members[root]) {
        if (pinned[m]) {
          is_pinned = true;
          value = pin[m];
        }
      }
      const int id = is_pinned ? -1 : add_reduced(f, index(root), Vec2::UnitX());
      for (int m : members[root]) {
        if (m >= num_vertices_) throw SolverError("periodic pair mixes vertex and midpoint");
        const int raw = index(m);
        if (id >= 0) exp[raw].push_back({id, 1.0});
        offset_[raw] = value;
      }
    }
  };
  scalar_field(Field::Pressure, [&](int v) { return pressure(v); }, p_pinned_, p_pin_);
  scalar_field(Field::DarcyPressure, [&](int v) { return darcy_pressure(v); }, pbar_pinned_, pbar_pin_);

  start_.assign(num_raw_ + 1, 0);
  for (int r = 0; r < num_raw_; ++r) start_[r + 1] = start_[r] + static_cast<int>(exp[r].size());
  terms_.reserve(start_.back());
  for (const auto& e : exp) terms_.insert(terms_.end(), e.begin(), e.end());
  finalized_ = true;
}

bool DofMap::is_constrained(int raw) const {
  const auto e = expansion(raw);
  if (e.size() != 1 || e[0].coef != 1.0 || offset_[raw] != 0.0) return true;
  return reduce_source_[e[0].reduced] != raw && reduce_source_[e[0].reduced] + 1 != raw;
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd raw = expand_direction(reduced);
  for (int r = 0; r < num_raw_; ++r) raw[r] += offset_[r];
  return raw;
}

Eigen::VectorXd DofMap::expand_direction(const Eigen::VectorXd& reduced) const {
  Eigen::VectorXd raw(num_raw_);
  for (int r = 0; r < num_raw_; ++r) {
    double s = 0.0;
    for (const auto& t : expansion(r)) s += t.coef * reduced[t.reduced];
    raw[r] = s;
  }
  return raw;
}

Eigen::VectorXd DofMap::restrict(const Eigen::VectorXd& raw) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_reduced_);
  for (int r = 0; r < num_raw_; ++r)
    for (const auto& t : expansion(r)) out[t.reduced] += t.coef * raw[r];
  return out;
}

Eigen::VectorXd DofMap::reduce(const Eigen::VectorXd& raw) const {
  Eigen::VectorXd x(num_reduced_);
  for (int k = 0; k < num_reduced_; ++k) {
    const int s = reduce_source_[k];
    const Field f = reduced_field_[k];
    if (f == Field::Velocity || f == Field::DarcyVelocity)
      x[k] = reduce_dir_[k].x() * raw[s] + reduce_dir_[k].y() * raw[s + 1];
    else
      x[k] = raw[s];
  }
  return x;
}

}  // namespace rebarflow::fem
