#include "reflex/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace reflex {

namespace {

// Nodes and weights of the 15-point Kronrod extension of 7-point Gauss on
// [-1, 1]. Odd-indexed xgk entries are the Gauss nodes.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

// One K15 panel: returns the Kronrod estimate and |K15 - G7| as the error.
template <typename F>
double gk15(const F& f, double a, double b, double* err) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f_center = f(center);
  double gauss = f_center * kWg[3];
  double kronrod = f_center * kWgk[7];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[i];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[i] * sum;
    if (i % 2 == 1) {
      gauss += kWg[i / 2] * sum;
    }
  }
  kronrod *= half;
  gauss *= half;
  if (err != nullptr) {
    *err = std::abs(kronrod - gauss);
  }
  return kronrod;
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth) {
  double err = 0.0;
  const double whole = gk15(f, a, b, &err);
  if (err <= tol || depth >= 48 || !(b - a > 0.0)) {
    return whole;
  }
  const double mid = 0.5 * (a + b);
  return adaptive_gk(f, a, mid, 0.5 * tol, depth + 1) +
         adaptive_gk(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_gauss_kronrod(const std::function<double(double)>& f, double a,
                              double b, double abs_tol) {
  if (!(b > a)) {
    throw DomainError("integration bounds must satisfy b > a");
  }
  if (!(abs_tol > 0.0)) {
    throw DomainError("tolerance must be positive");
  }
  return adaptive_gk(f, a, b, abs_tol, 0);
}

CubicHermite::CubicHermite(const ForceTrace& trace)
    : t_(trace.t), f_(trace.f) {
  validate(trace);
  const std::size_t n = t_.size();
  if (n < 2) {
    throw DomainError("interpolation needs at least 2 samples");
  }
  slope_.resize(n);
  if (n == 2) {
    slope_[0] = slope_[1] = (f_[1] - f_[0]) / (t_[1] - t_[0]);
    return;
  }
  slope_.front() = (f_[1] - f_[0]) / (t_[1] - t_[0]);
  slope_.back() = (f_[n - 1] - f_[n - 2]) / (t_[n - 1] - t_[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    slope_[i] = (f_[i + 1] - f_[i - 1]) / (t_[i + 1] - t_[i - 1]);
  }
}

double CubicHermite::eval_interval(std::size_t i, double t) const {
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * f_[i] + h10 * h * slope_[i] + h01 * f_[i + 1] +
         h11 * h * slope_[i + 1];
}

double CubicHermite::operator()(double t) const {
  if (t <= t_.front()) {
    return f_.front();
  }
  if (t >= t_.back()) {
    return f_.back();
  }
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  return eval_interval(std::min(i, t_.size() - 2), t);
}

double CubicHermite::integrate_interval(std::size_t i, double abs_tol) const {
  const auto f = [this, i](double t) { return eval_interval(i, t); };
  return adaptive_gk(f, t_[i], t_[i + 1], abs_tol, 0);
}

double trapezoid(const ForceTrace& trace) {
  validate(trace);
  double sum = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    sum += 0.5 * (trace.f[i] + trace.f[i - 1]) * (trace.t[i] - trace.t[i - 1]);
  }
  return sum;
}

double integrate_trace(const ForceTrace& trace, IntegrationMethod method) {
  validate(trace);
  if (trace.size() < 8) {
    throw DomainError("trace integration needs at least 8 samples");
  }
  if (method == IntegrationMethod::kTrapezoid) {
    return trapezoid(trace);
  }

  // Panels start at the spline knots (the interpolant is a polynomial on each
  // one, so K15 is exact there and the bisection fallback rarely fires).
  const CubicHermite spline(trace);
  const double span = trace.t.back() - trace.t.front();
  const double abs_tol = 1e-9;
  double sum = 0.0;
  double compensation = 0.0;  // Kahan, the panel count can reach millions
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const double share =
        abs_tol * (trace.t[i + 1] - trace.t[i]) / span;
    const double y = spline.integrate_interval(i, share) - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace reflex
