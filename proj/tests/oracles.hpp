// Test-only numerical oracles, deliberately independent of the library's own
// computation paths: brute-force quadrature, golden-section minimization,
// finite differences, and a static two-spring-chain solve.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

namespace oracles {

// Composite trapezoid quadrature on a dense uniform grid.
inline double dense_trapezoid(const std::function<double(double)>& f, double a,
                              double b, int n = 200000) {
  double sum = 0.5 * (f(a) + f(b));
  const double h = (b - a) / n;
  for (int i = 1; i < n; ++i) {
    sum += f(a + i * h);
  }
  return sum * h;
}

// Golden-section search for the minimizer of a unimodal function on [a, b].
inline double golden_section_min(const std::function<double(double)>& f,
                                 double a, double b, int iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

inline double central_difference(const std::function<double(double)>& f,
                                 double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Effective stiffness of two springs in a chain, from the static equilibrium
// of the interior node under a unit end load (independent of the algebraic
// series formula).
inline double two_spring_chain_stiffness(double k1, double k2) {
  Eigen::Matrix2d stiffness;
  stiffness << k1 + k2, -k2, -k2, k2;
  const Eigen::Vector2d load(0.0, 1.0);
  const Eigen::Vector2d x = stiffness.fullPivLu().solve(load);
  return load(1) / x(1);
}

}  // namespace oracles
