#pragma once

#include <functional>

#include "reflex/force_trace.hpp"

namespace reflex {

enum class IntegrationMethod { kTrapezoid, kGaussKronrod };

// Piecewise-cubic Hermite interpolant of a sampled trace (three-point
// finite-difference slopes). Gives the adaptive quadrature a continuum
// integrand.
class CubicHermite {
 public:
  explicit CubicHermite(const ForceTrace& trace);

  double operator()(double t) const;
  std::size_t knots() const { return t_.size(); }
  // Integral of the local cubic over the i-th knot interval, evaluated by a
  // 15-point Gauss-Kronrod panel with bisection on the error estimate.
  double integrate_interval(std::size_t i, double abs_tol) const;

 private:
  double eval_interval(std::size_t i, double t) const;

  std::vector<double> t_;
  std::vector<double> f_;
  std::vector<double> slope_;
};

// Adaptive Gauss-Kronrod (G7/K15) quadrature of `f` over [a, b], bisecting
// intervals until the K15-vs-G7 error estimate meets the tolerance share.
double adaptive_gauss_kronrod(const std::function<double(double)>& f, double a,
                              double b, double abs_tol = 1e-9);

// Exact integral of the piecewise-linear interpolant of the samples.
double trapezoid(const ForceTrace& trace);

// Total impulse of a trace. Trapezoid is exact for the sampled polyline;
// Gauss-Kronrod integrates a cubic interpolant to 1e-9 N s absolute. Requires
// at least 8 samples.
double integrate_trace(const ForceTrace& trace, IntegrationMethod method);

}  // namespace reflex
