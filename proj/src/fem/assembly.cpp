#include "rebarflow/fem/assembly.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>

#include "rebarflow/fem/quadrature.hpp"
#include "rebarflow/fem/reference_element.hpp"

namespace rebarflow::fem {

namespace {

using mesh::Region;
using Local15 = Eigen::Matrix<double, 15, 15>;
using Vec15 = Eigen::Matrix<double, 15, 1>;
using StrainOp = Eigen::Matrix<double, 3, 12>;

constexpr double kInvSqrt2 = 0.70710678118654752440;

ElementGeometry element_geometry(const mesh::Mesh& m, int t) {
  const auto& n = m.triangles[t].nodes;
  ElementGeometry g({m.nodes[n[0]], m.nodes[n[1]], m.nodes[n[2]]});
  if (g.det <= 0.0) throw SolverError("non-positive Jacobian in element " + std::to_string(t));
  return g;
}

double value_at(const Eigen::VectorXd& state, int raw) { return raw < 0 ? 0.0 : state[raw]; }

/// Mandel coordinates of D(N_i e_a) for all 12 velocity DOFs.
StrainOp strain_operator(const Grad6& g) {
  StrainOp b = StrainOp::Zero();
  for (int i = 0; i < 6; ++i) {
    b(0, 2 * i) = g(i, 0);
    b(2, 2 * i) = kInvSqrt2 * g(i, 1);
    b(1, 2 * i + 1) = g(i, 1);
    b(2, 2 * i + 1) = kInvSqrt2 * g(i, 0);
  }
  return b;
}

void scatter(Accumulator& acc, const std::array<int, 15>& dofs, const Vec15& r, const Local15& k) {
  acc.add_vector(dofs, r.data());
  if (acc.wants_matrix()) acc.add_matrix(dofs, dofs, k.data());
}

using EdgeKey = std::pair<int, int>;
EdgeKey key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

}  // namespace

std::vector<EdgeFrame> edge_frames(const mesh::Mesh& m, mesh::BoundaryTag tag, std::optional<Region> side) {
  std::map<EdgeKey, std::vector<int>> adj;
  for (const auto& e : m.edges)
    if (e.tag == tag) adj[key(e.a, e.b)];
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& n = m.triangles[t].nodes;
    for (int k = 0; k < 3; ++k) {
      auto it = adj.find(key(n[k], n[(k + 1) % 3]));
      if (it != adj.end()) it->second.push_back(t);
    }
  }
  std::vector<EdgeFrame> frames;
  for (int i = 0; i < static_cast<int>(m.edges.size()); ++i) {
    const auto& e = m.edges[i];
    if (e.tag != tag) continue;
    int owner = -1;
    for (int t : adj[key(e.a, e.b)]) {
      if (!side || m.triangles[t].region == *side) {
        owner = t;
        break;
      }
    }
    if (owner < 0) continue;
    const Vec2 d = m.nodes[e.b] - m.nodes[e.a];
    Vec2 n(d.y(), -d.x());
    const double len = d.norm();
    n /= len;
    // Orient away from the owner's third vertex.
    const auto& tn = m.triangles[owner].nodes;
    int third = tn[0];
    for (int k = 0; k < 3; ++k)
      if (tn[k] != e.a && tn[k] != e.b) third = tn[k];
    if (n.dot(m.nodes[third] - m.nodes[e.a]) > 0.0) n = -n;
    frames.push_back({i, owner, n, len});
  }
  return frames;
}

std::vector<Vec2> node_normals(const mesh::Mesh& m, std::span<const EdgeFrame> frames) {
  std::vector<Vec2> out(m.num_nodes(), Vec2::Zero());
  for (const auto& f : frames) {
    const auto& e = m.edges[f.edge];
    for (int v : {e.a, e.b, e.mid})
      if (v >= 0) out[v] += f.length * f.normal;
  }
  for (auto& n : out) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return out;
}

std::array<int, 15> triangle_dofs(const DofMap& dofs, int t) {
  const auto& tri = dofs.mesh().triangles[t];
  std::array<int, 15> d{};
  const bool darcy = tri.region == Region::Darcy;
  for (int i = 0; i < 6; ++i) {
    for (int a = 0; a < 2; ++a)
      d[2 * i + a] = darcy ? dofs.darcy_velocity(tri.nodes[i], a) : dofs.velocity(tri.nodes[i], a);
  }
  for (int k = 0; k < 3; ++k)
    d[12 + k] = darcy ? dofs.darcy_pressure(tri.nodes[k]) : dofs.pressure(tri.nodes[k]);
  return d;
}

void add_pattern(SparsityBuilder& builder, const DofMap& dofs, std::span<const EdgeFrame> interface) {
  const auto& m = dofs.mesh();
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto d = triangle_dofs(dofs, t);
    builder.add_group(d);
  }
  for (const auto& f : interface) {
    const auto& e = m.edges[f.edge];
    std::array<int, 8> g{dofs.velocity(e.a, 0), dofs.velocity(e.a, 1), dofs.velocity(e.mid, 0),
                         dofs.velocity(e.mid, 1), dofs.velocity(e.b, 0), dofs.velocity(e.b, 1),
                         dofs.darcy_pressure(e.a), dofs.darcy_pressure(e.b)};
    builder.add_group(g);
  }
}

void assemble_stokes(const DofMap& dofs, const StokesTerms& terms, const Eigen::VectorXd& state,
                     Accumulator& acc) {
  if (!terms.law) throw SolverError("Stokes assembly without a fluid law");
  const auto& law = *terms.law;
  if (terms.form == ViscousForm::Laplacian && law.kind() != constitutive::LawKind::Newtonian)
    throw SolverError("Laplacian viscous form requires a Newtonian law");
  const auto& m = dofs.mesh();
  const QuadratureRule& rule7 = terms.viscous_rule ? *terms.viscous_rule : triangle_rule_7();
  const QuadratureRule& rule3 = triangle_rule_3();
  const Eigen::Matrix3d proj = constitutive::deviatoric_projector().mandel();
  const bool want_k = acc.wants_matrix();

  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.triangles[t].region == Region::Darcy) continue;
    const ElementGeometry geo = element_geometry(m, t);
    const auto d = triangle_dofs(dofs, t);
    Eigen::Matrix<double, 12, 1> ue;
    Eigen::Vector3d pe;
    for (int i = 0; i < 12; ++i) ue[i] = value_at(state, d[i]);
    for (int k = 0; k < 3; ++k) pe[k] = value_at(state, d[12 + k]);

    Vec15 r = Vec15::Zero();
    Local15 k = Local15::Zero();

    for (const auto& qp : rule7.points) {
      const double w = qp.weight * geo.det;
      const Grad6 g = geo.physical<6>(p2_reference_gradients(qp.bary));
      if (terms.form == ViscousForm::Laplacian) {
        const double mu = law.base_viscosity();
        Mat2 grad = Mat2::Zero();  // grad(a, b) = d u_a / d x_b
        for (int i = 0; i < 6; ++i) {
          grad.row(0) += ue[2 * i] * g.row(i);
          grad.row(1) += ue[2 * i + 1] * g.row(i);
        }
        for (int i = 0; i < 6; ++i) {
          r[2 * i] += w * mu * grad.row(0).dot(g.row(i));
          r[2 * i + 1] += w * mu * grad.row(1).dot(g.row(i));
          if (!want_k) continue;
          for (int j = 0; j < 6; ++j) {
            const double v = w * mu * g.row(i).dot(g.row(j));
            k(2 * i, 2 * j) += v;
            k(2 * i + 1, 2 * j + 1) += v;
          }
        }
      } else {
        const StrainOp b = strain_operator(g);
        const auto strain = constitutive::SymTensor2::from_mandel(b * ue);
        const Eigen::Vector3d tau = constitutive::deviatoric_stress(law, strain).mandel();
        r.head<12>() += w * b.transpose() * tau;
        if (want_k) {
          Eigen::Matrix3d c = constitutive::tangent(law, strain).mandel();
          if (terms.projection == TangentProjection::Deviatoric) c = c * proj;
          k.topLeftCorner<12, 12>() += w * b.transpose() * c * b;
        }
      }
      if (terms.body) {
        const Vec2 f = terms.body(geo.map(qp.bary));
        const auto n = p2_values(qp.bary);
        for (int i = 0; i < 6; ++i) {
          r[2 * i] -= w * n[i] * f.x();
          r[2 * i + 1] -= w * n[i] * f.y();
        }
      }
    }

    for (const auto& qp : rule3.points) {
      const double w = qp.weight * geo.det;
      const Grad6 g = geo.physical<6>(p2_reference_gradients(qp.bary));
      const Eigen::Vector3d psi = p1_values(qp.bary);
      const double p = psi.dot(pe);
      double div = 0.0;
      for (int i = 0; i < 6; ++i) div += ue[2 * i] * g(i, 0) + ue[2 * i + 1] * g(i, 1);
      for (int i = 0; i < 6; ++i) {
        r[2 * i] -= w * g(i, 0) * p;
        r[2 * i + 1] -= w * g(i, 1) * p;
      }
      for (int q = 0; q < 3; ++q) r[12 + q] += w * psi[q] * div;
      if (!want_k) continue;
      for (int i = 0; i < 6; ++i) {
        for (int a = 0; a < 2; ++a) {
          for (int q = 0; q < 3; ++q) {
            const double v = w * g(i, a) * psi[q];
            k(2 * i + a, 12 + q) -= v;
            k(12 + q, 2 * i + a) += v;
          }
        }
      }
    }
    scatter(acc, d, r, k);
  }
}

Vec2 darcy_gradient(const DofMap& dofs, int t, const Eigen::VectorXd& state) {
  const auto& m = dofs.mesh();
  const ElementGeometry geo = element_geometry(m, t);
  const Grad3 g = geo.physical<3>(p1_reference_gradients());
  Vec2 grad = Vec2::Zero();
  for (int k = 0; k < 3; ++k) grad += value_at(state, dofs.darcy_pressure(m.triangles[t].nodes[k])) * g.row(k).transpose();
  return grad;
}

std::vector<DarcyLaw::Response> assemble_darcy(const DofMap& dofs, DarcyLaw& law, const Vec2& body,
                                               const Eigen::VectorXd& state, Accumulator& acc) {
  const auto& m = dofs.mesh();
  std::vector<int> elements;
  std::vector<Vec2> grads;
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.triangles[t].region != Region::Darcy) continue;
    elements.push_back(t);
    grads.push_back(darcy_gradient(dofs, t, state));
  }
  if (elements.empty()) return {};
  std::vector<DarcyLaw::Response> resp = law.evaluate(elements, grads, body);
  if (resp.size() != elements.size()) throw SolverError("homogenized law returned wrong number of responses");

  const QuadratureRule& rule7 = triangle_rule_7();
  const QuadratureRule& rule3 = triangle_rule_3();
  const bool want_k = acc.wants_matrix();

  for (std::size_t e = 0; e < elements.size(); ++e) {
    const int t = elements[e];
    const ElementGeometry geo = element_geometry(m, t);
    const auto d = triangle_dofs(dofs, t);
    Eigen::Matrix<double, 12, 1> ue;
    for (int i = 0; i < 12; ++i) ue[i] = value_at(state, d[i]);
    const Grad3 gp = geo.physical<3>(p1_reference_gradients());
    const Vec2& wbar = resp[e].flux;
    const Mat2& dw = resp[e].dflux_dgrad;

    Vec15 r = Vec15::Zero();
    Local15 k = Local15::Zero();
    Eigen::Matrix<double, 6, 1> mass = Eigen::Matrix<double, 6, 1>::Zero();

    for (const auto& qp : rule7.points) {
      const double w = qp.weight * geo.det;
      const auto n = p2_values(qp.bary);
      Vec2 u = Vec2::Zero();
      for (int i = 0; i < 6; ++i) u += n[i] * Vec2(ue[2 * i], ue[2 * i + 1]);
      mass += w * n;
      for (int i = 0; i < 6; ++i) {
        r[2 * i] += w * n[i] * u.x();
        r[2 * i + 1] += w * n[i] * u.y();
        if (!want_k) continue;
        for (int j = 0; j < 6; ++j) {
          const double v = w * n[i] * n[j];
          k(2 * i, 2 * j) += v;
          k(2 * i + 1, 2 * j + 1) += v;
        }
      }
    }
    for (int i = 0; i < 6; ++i) {
      r[2 * i] -= mass[i] * wbar.x();
      r[2 * i + 1] -= mass[i] * wbar.y();
      if (!want_k) continue;
      for (int q = 0; q < 3; ++q) {
        const Vec2 c = dw * gp.row(q).transpose();
        k(2 * i, 12 + q) -= mass[i] * c.x();
        k(2 * i + 1, 12 + q) -= mass[i] * c.y();
      }
    }
    for (const auto& qp : rule3.points) {
      const double w = qp.weight * geo.det;
      const Grad6 g = geo.physical<6>(p2_reference_gradients(qp.bary));
      const Eigen::Vector3d psi = p1_values(qp.bary);
      double div = 0.0;
      for (int i = 0; i < 6; ++i) div += ue[2 * i] * g(i, 0) + ue[2 * i + 1] * g(i, 1);
      for (int q = 0; q < 3; ++q) r[12 + q] += w * psi[q] * div;
      if (!want_k) continue;
      for (int i = 0; i < 6; ++i)
        for (int a = 0; a < 2; ++a)
          for (int q = 0; q < 3; ++q) k(12 + q, 2 * i + a) += w * psi[q] * g(i, a);
    }
    scatter(acc, d, r, k);
  }
  return resp;
}

void assemble_interface(const DofMap& dofs, std::span<const EdgeFrame> frames, double beta,
                        const Eigen::VectorXd& state, Accumulator& acc) {
  if (!(beta >= 0.0)) throw ConfigError("interface friction beta must be non-negative");
  const auto& m = dofs.mesh();
  const LineRule& rule = line_rule_3();
  for (const auto& f : frames) {
    const auto& e = m.edges[f.edge];
    const std::array<int, 3> nodes{e.a, e.mid, e.b};
    std::array<int, 8> d{};
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 2; ++a) d[2 * i + a] = dofs.velocity(nodes[i], a);
    d[6] = dofs.darcy_pressure(e.a);
    d[7] = dofs.darcy_pressure(e.b);
    Eigen::Matrix<double, 8, 1> loc;
    for (int i = 0; i < 8; ++i) loc[i] = value_at(state, d[i]);

    const Vec2 n = f.normal;
    const Vec2 tan(-n.y(), n.x());
    Eigen::Matrix<double, 8, 1> r = Eigen::Matrix<double, 8, 1>::Zero();
    Eigen::Matrix<double, 8, 8> k = Eigen::Matrix<double, 8, 8>::Zero();
    for (std::size_t q = 0; q < rule.t.size(); ++q) {
      const double s = rule.t[q];
      const double w = rule.w[q] * f.length;
      const Eigen::Vector3d nv = p2_edge_values(s);
      const Eigen::Vector2d psi(1.0 - s, s);
      double ut = 0.0;
      for (int i = 0; i < 3; ++i) ut += nv[i] * tan.dot(Vec2(loc[2 * i], loc[2 * i + 1]));
      const double pbar = psi.dot(loc.tail<2>());
      for (int i = 0; i < 3; ++i) {
        for (int a = 0; a < 2; ++a) {
          r[2 * i + a] += w * nv[i] * (beta * ut * tan[a] - pbar * n[a]);
          for (int j = 0; j < 3; ++j)
            for (int c = 0; c < 2; ++c) k(2 * i + a, 2 * j + c) += w * beta * nv[i] * nv[j] * tan[a] * tan[c];
          for (int v = 0; v < 2; ++v) k(2 * i + a, 6 + v) -= w * nv[i] * psi[v] * n[a];
        }
      }
    }
    acc.add_vector(d, r.data());
    if (acc.wants_matrix()) acc.add_matrix(d, d, k.data());
  }
}

void assemble_normal_traction(const DofMap& dofs, std::span<const EdgeFrame> frames, double p_hat,
                              Accumulator& acc) {
  if (p_hat == 0.0) return;
  const auto& m = dofs.mesh();
  for (const auto& f : frames) {
    const auto& e = m.edges[f.edge];
    // Exact integrals of the quadratic edge trace: L/6, 2L/3, L/6.
    const double wt[3] = {f.length / 6.0, 2.0 * f.length / 3.0, f.length / 6.0};
    const int nodes[3] = {e.a, e.mid, e.b};
    std::array<int, 6> d{};
    std::array<double, 6> r{};
    for (int i = 0; i < 3; ++i) {
      for (int a = 0; a < 2; ++a) {
        d[2 * i + a] = dofs.velocity(nodes[i], a);
        r[2 * i + a] = wt[i] * p_hat * f.normal[a];
      }
    }
    acc.add_vector(d, r.data());
  }
}

void assemble_edge_load(const DofMap& dofs, mesh::BoundaryTag tag, const Vec2& load, Accumulator& acc) {
  const auto& m = dofs.mesh();
  for (const auto& e : m.edges) {
    if (e.tag != tag) continue;
    const double len = (m.nodes[e.b] - m.nodes[e.a]).norm();
    const double wt[3] = {len / 6.0, 2.0 * len / 3.0, len / 6.0};
    const int nodes[3] = {e.a, e.mid, e.b};
    std::array<int, 6> d{};
    std::array<double, 6> r{};
    for (int i = 0; i < 3; ++i) {
      for (int a = 0; a < 2; ++a) {
        d[2 * i + a] = dofs.velocity(nodes[i], a);
        r[2 * i + a] = -wt[i] * load[a];
      }
    }
    acc.add_vector(d, r.data());
  }
}

}  // namespace rebarflow::fem
