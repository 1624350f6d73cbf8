#include "rebarflow/constitutive/fluid_law.hpp"

#include <cmath>
#include <numbers>

#include "rebarflow/common.hpp"

namespace rebarflow::constitutive {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Voigt slot of (i, j) and the Mandel weight of that slot.
int slot(int i, int j) { return i == j ? i : 2; }
double weight(int a) { return a == 2 ? kSqrt2 : 1.0; }

// g(x) = ((x + 1) e^-x - 1) / x^2, accurate for small x where the closed form
// cancels catastrophically.
double shifted_exp_ratio(double x) {
  if (x < 1e-2) {
    return -0.5 + x * (1.0 / 3.0 + x * (-1.0 / 8.0 + x * (1.0 / 30.0 + x * (-1.0 / 144.0 + x / 840.0))));
  }
  return ((x + 1.0) * std::exp(-x) - 1.0) / (x * x);
}

}  // namespace

Eigen::Vector3d SymTensor2::mandel() const { return {d11, d22, kSqrt2 * d12}; }

SymTensor2 SymTensor2::from_mandel(const Eigen::Vector3d& v) { return {v[0], v[1], v[2] / kSqrt2}; }

SymTensor2 SymTensor2::rotated(double angle) const {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  Eigen::Matrix2d a;
  a << d11, d12, d12, d22;
  const Eigen::Matrix2d b = r * a * r.transpose();
  return {b(0, 0), b(1, 1), 0.5 * (b(0, 1) + b(1, 0))};
}

Tangent4 Tangent4::outer(const SymTensor2& a, const SymTensor2& b) {
  return Tangent4(a.mandel() * b.mandel().transpose());
}

double Tangent4::component(int i, int j, int k, int l) const {
  const int a = slot(i, j);
  const int b = slot(k, l);
  return mandel_(a, b) / (weight(a) * weight(b));
}

FluidLaw FluidLaw::newtonian(double mu) {
  if (!(mu > 0.0)) throw ConfigError("Newtonian viscosity must be positive");
  return FluidLaw(Newtonian{mu});
}

FluidLaw FluidLaw::bingham(double mu0, double tau0, double m) {
  if (!(mu0 > 0.0)) throw ConfigError("plastic viscosity mu0 must be positive");
  if (!(tau0 >= 0.0)) throw ConfigError("yield stress tau0 must be non-negative");
  if (!(m > 0.0)) throw ConfigError("regularization parameter m must be positive");
  return FluidLaw(Bingham{mu0, tau0, m});
}

double FluidLaw::base_viscosity() const {
  return std::visit([](const auto& p) {
    if constexpr (std::is_same_v<std::decay_t<decltype(p)>, Newtonian>) return p.mu;
    else return p.mu0;
  }, law_);
}

double FluidLaw::rest_viscosity() const {
  if (const auto* b = std::get_if<Bingham>(&law_)) return b->mu0 + b->tau0 * b->m;
  return std::get<Newtonian>(law_).mu;
}

double FluidLaw::apparent_viscosity(double j2_value) const {
  const auto* b = std::get_if<Bingham>(&law_);
  if (!b) return std::get<Newtonian>(law_).mu;
  const double s = std::sqrt(std::max(j2_value, 0.0));
  if (s < kRegularizationThreshold) {
    const double m = b->m;
    return b->mu0 + b->tau0 * (m - 0.5 * m * m * s + m * m * m * s * s / 6.0);
  }
  return b->mu0 + b->tau0 * (-std::expm1(-b->m * s)) / s;
}

double FluidLaw::apparent_viscosity_derivative(double j2_value) const {
  const auto* b = std::get_if<Bingham>(&law_);
  if (!b) return 0.0;
  const double s = std::sqrt(std::max(j2_value, 0.0));
  // tau0 [(m s + 1) e^{-m s} - 1] / (2 J2^{3/2}) rewritten as tau0 m^2 g(m s) / (2 s)
  return b->tau0 * b->m * b->m * shifted_exp_ratio(b->m * s) / (2.0 * s);
}

double j2(const SymTensor2& d) { return 0.5 * d.ddot(d); }

SymTensor2 deviatoric_stress(const FluidLaw& law, const SymTensor2& d) {
  return law.apparent_viscosity(j2(d)) * d;
}

Tangent4 tangent(const FluidLaw& law, const SymTensor2& d) {
  const double j = j2(d);
  Tangent4 c = law.apparent_viscosity(j) * Tangent4::symmetric_identity();
  if (law.kind() == LawKind::Bingham && j > 0.0) {
    c = c + law.apparent_viscosity_derivative(j) * Tangent4::outer(d, d);
  }
  return c;
}

Tangent4 deviatoric_projector() {
  Eigen::Matrix3d p = Eigen::Matrix3d::Identity();
  const Eigen::Vector3d m(1.0, 1.0, 0.0);
  p -= m * m.transpose() / 3.0;
  return Tangent4(p);
}

}  // namespace rebarflow::constitutive
