#pragma once

#include <cmath>
#include <Eigen/Core>
#include <variant>

namespace rebarflow::constitutive {

/// Symmetric 2x2 tensor (strain rate or deviatoric stress) with a single
/// off-diagonal slot.
struct SymTensor2 {
  double d11 = 0.0;
  double d22 = 0.0;
  double d12 = 0.0;

  double trace() const { return d11 + d22; }
  /// Double contraction A:B.
  double ddot(const SymTensor2& o) const { return d11 * o.d11 + d22 * o.d22 + 2.0 * d12 * o.d12; }
  double norm() const { return std::sqrt(ddot(*this)); }

  /// Mandel coordinates (d11, d22, sqrt(2) d12); the Euclidean inner product
  /// of Mandel vectors equals the tensor double contraction.
  Eigen::Vector3d mandel() const;
  static SymTensor2 from_mandel(const Eigen::Vector3d& v);

  /// R A R^T
  SymTensor2 rotated(double angle) const;

  friend SymTensor2 operator+(const SymTensor2& a, const SymTensor2& b) {
    return {a.d11 + b.d11, a.d22 + b.d22, a.d12 + b.d12};
  }
  friend SymTensor2 operator-(const SymTensor2& a, const SymTensor2& b) {
    return {a.d11 - b.d11, a.d22 - b.d22, a.d12 - b.d12};
  }
  friend SymTensor2 operator*(double s, const SymTensor2& a) { return {s * a.d11, s * a.d22, s * a.d12}; }
};

/// Fourth-order tensor with minor symmetries, restricted to symmetric
/// arguments. Stored as a 3x3 matrix in Mandel coordinates, so major symmetry
/// is plain matrix symmetry.
class Tangent4 {
 public:
  Tangent4() : mandel_(Eigen::Matrix3d::Zero()) {}
  explicit Tangent4(const Eigen::Matrix3d& mandel) : mandel_(mandel) {}

  static Tangent4 symmetric_identity() { return Tangent4(Eigen::Matrix3d::Identity()); }
  /// A (x) B
  static Tangent4 outer(const SymTensor2& a, const SymTensor2& b);

  const Eigen::Matrix3d& mandel() const { return mandel_; }
  SymTensor2 apply(const SymTensor2& d) const { return SymTensor2::from_mandel(mandel_ * d.mandel()); }
  /// C_ijkl with zero-based indices in {0, 1}.
  double component(int i, int j, int k, int l) const;

  Tangent4 operator*(const Tangent4& o) const { return Tangent4(mandel_ * o.mandel_); }
  friend Tangent4 operator+(const Tangent4& a, const Tangent4& b) { return Tangent4(a.mandel_ + b.mandel_); }
  friend Tangent4 operator*(double s, const Tangent4& a) { return Tangent4(s * a.mandel_); }

 private:
  Eigen::Matrix3d mandel_;
};

enum class LawKind { Newtonian, Bingham };

/// Newtonian fluid, tau = mu D.
struct Newtonian {
  double mu = 1.0;
};

/// Regularized (Papanastasiou) Bingham fluid,
/// tau = [mu0 + tau0 (1 - exp(-m sqrt(J2))) / sqrt(J2)] D.
struct Bingham {
  double mu0 = 1.0;
  double tau0 = 0.0;
  double m = 1.0;
};

class FluidLaw {
 public:
  /// Below this value of sqrt(J2) the apparent viscosity is evaluated by its
  /// series expansion.
  static constexpr double kRegularizationThreshold = 1e-12;

  static FluidLaw newtonian(double mu);
  static FluidLaw bingham(double mu0, double tau0, double m);

  LawKind kind() const { return std::holds_alternative<Newtonian>(law_) ? LawKind::Newtonian : LawKind::Bingham; }
  const std::variant<Newtonian, Bingham>& parameters() const { return law_; }

  /// mu for Newtonian, mu0 for Bingham.
  double base_viscosity() const;
  /// Supremum of the apparent viscosity (attained at rest).
  double rest_viscosity() const;

  double apparent_viscosity(double j2) const;
  /// d mu_app / d J2.
  double apparent_viscosity_derivative(double j2) const;

 private:
  explicit FluidLaw(std::variant<Newtonian, Bingham> law) : law_(law) {}
  std::variant<Newtonian, Bingham> law_;
};

/// J2 = 1/2 D:D
double j2(const SymTensor2& d);

SymTensor2 deviatoric_stress(const FluidLaw& law, const SymTensor2& d);

/// d tau / d D = mu_app I_sym + mu_app' D (x) D
Tangent4 tangent(const FluidLaw& law, const SymTensor2& d);

/// [I_dev]_ijkl = delta_ik delta_jl - 1/3 delta_ij delta_kl
Tangent4 deviatoric_projector();

}  // namespace rebarflow::constitutive
