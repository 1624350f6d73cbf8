#include "rebarflow/fem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rebarflow::fem {

namespace {

QuadratureRule make_rule_3() {
  QuadratureRule r;
  r.degree = 2;
  const double a = 2.0 / 3.0, b = 1.0 / 6.0;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d l = Eigen::Vector3d::Constant(b);
    l[k] = a;
    r.points.push_back({l, 1.0 / 6.0});
  }
  return r;
}

QuadratureRule make_rule_7() {
  QuadratureRule r;
  r.degree = 5;
  const double s15 = std::sqrt(15.0);
  r.points.push_back({Eigen::Vector3d::Constant(1.0 / 3.0), 9.0 / 80.0});
  const double p[2] = {(6.0 - s15) / 21.0, (6.0 + s15) / 21.0};
  const double w[2] = {(155.0 - s15) / 2400.0, (155.0 + s15) / 2400.0};
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d l = Eigen::Vector3d::Constant(p[j]);
      l[k] = 1.0 - 2.0 * p[j];
      r.points.push_back({l, w[j]});
    }
  }
  return r;
}

}  // namespace

const QuadratureRule& triangle_rule_3() {
  static const QuadratureRule rule = make_rule_3();
  return rule;
}

const QuadratureRule& triangle_rule_7() {
  static const QuadratureRule rule = make_rule_7();
  return rule;
}

LineRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  LineRule r;
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.t.push_back(0.5 * (1.0 - x));
    r.w.push_back(1.0 / ((1.0 - x * x) * dp * dp));
  }
  return r;
}

const LineRule& line_rule_3() {
  static const LineRule rule = [] {
    LineRule r;
    const double d = 0.5 * std::sqrt(0.6);
    r.t = {0.5 - d, 0.5, 0.5 + d};
    r.w = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    return r;
  }();
  return rule;
}

QuadratureRule triangle_rule_conical(int n) {
  const LineRule g = gauss_legendre(n);
  QuadratureRule r;
  r.degree = 2 * n - 2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = g.t[i], v = g.t[j];
      const double xi = u, eta = v * (1.0 - u);
      r.points.push_back({Eigen::Vector3d(1.0 - xi - eta, xi, eta), g.w[i] * g.w[j] * (1.0 - u)});
    }
  }
  return r;
}

}  // namespace rebarflow::fem
