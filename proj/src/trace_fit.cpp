#include "reflex/trace_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "reflex/reflex_core.hpp"

namespace reflex {

namespace {

std::vector<double> moving_average(const std::vector<double>& f, int window) {
  const int n = static_cast<int>(f.size());
  std::vector<double> out(f.size());
  double sum = 0.0;
  int lo = 0;
  int hi = -1;  // inclusive window [lo, hi] around i
  for (int i = 0; i < n; ++i) {
    const int want_lo = std::max(0, i - window / 2);
    const int want_hi = std::min(n - 1, i + window / 2);
    while (hi < want_hi) sum += f[++hi];
    while (lo < want_lo) sum -= f[lo++];
    out[i] = sum / (hi - lo + 1);
  }
  return out;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& f,
                 std::size_t begin, std::size_t end) {
  Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
  Eigen::Vector2d atb = Eigen::Vector2d::Zero();
  for (std::size_t i = begin; i <= end; ++i) {
    const Eigen::Vector2d row(t[i], 1.0);
    ata += row * row.transpose();
    atb += row * f[i];
  }
  const Eigen::Vector2d sol = ata.ldlt().solve(atb);
  return {sol(0), sol(1)};
}

// f ~ c0 + c1 t + c2 t^2; time is shifted to the window start for
// conditioning and the coefficients mapped back.
Eigen::Vector3d fit_quadratic(const std::vector<double>& t,
                              const std::vector<double>& f, std::size_t begin,
                              std::size_t end) {
  const double t0 = t[begin];
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  for (std::size_t i = begin; i <= end; ++i) {
    const double s = t[i] - t0;
    const Eigen::Vector3d row(1.0, s, s * s);
    ata += row * row.transpose();
    atb += row * f[i];
  }
  const Eigen::Vector3d c = ata.ldlt().solve(atb);
  // c0 + c1 (t - t0) + c2 (t - t0)^2 -> a0 + a1 t + a2 t^2
  return {c(0) - c(1) * t0 + c(2) * t0 * t0, c(1) - 2.0 * c(2) * t0, c(2)};
}

double stddev(const std::vector<double>& f, std::size_t begin,
              std::size_t end) {
  double mean = 0.0;
  for (std::size_t i = begin; i <= end; ++i) mean += f[i];
  const double n = static_cast<double>(end - begin + 1);
  mean /= n;
  double var = 0.0;
  for (std::size_t i = begin; i <= end; ++i) {
    var += (f[i] - mean) * (f[i] - mean);
  }
  return std::sqrt(var / std::max(1.0, n - 1.0));
}

double median_of(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid];
}

// Robust sigma of the leading window: median absolute deviation survives the
// window clipping the start of the contact event.
double mad_sigma(const std::vector<double>& f, std::size_t begin,
                 std::size_t end) {
  std::vector<double> window(f.begin() + begin, f.begin() + end + 1);
  const double med = median_of(window);
  for (double& v : window) {
    v = std::abs(v - med);
  }
  return 1.4826 * median_of(window);
}

}  // namespace

Segmentation segment_trace(const ForceTrace& trace) {
  validate(trace);
  const std::size_t n = trace.size();
  if (n < 8) {
    throw DomainError("segmentation needs at least 8 samples");
  }
  const std::vector<double>& t = trace.t;
  const std::vector<double>& f = trace.f;

  Segmentation seg;

  // Noise floor from the pre-contact window (first 5% of samples). The MAD
  // estimate keeps the threshold sane even if the window clips the event.
  const std::size_t floor_end = std::max<std::size_t>(3, n / 20) - 1;
  const double floor_sigma = mad_sigma(f, 0, floor_end);
  const double peak_abs =
      std::abs(*std::max_element(f.begin(), f.end(),
                                 [](double a, double b) {
                                   return std::abs(a) < std::abs(b);
                                 }));
  const double theta = 3.0 * floor_sigma + 1e-9 + 1e-6 * peak_abs;

  // Contact: first run of 3 samples above the floor.
  std::size_t c = n;
  for (std::size_t i = 0; i + 2 < n; ++i) {
    if (f[i] > theta && f[i + 1] > theta && f[i + 2] > theta) {
      c = i;
      break;
    }
  }
  if (c == n) {
    throw TraceError("no-contact", "no contact episode found in trace");
  }
  seg.t_contact = t[c > 0 ? c - 1 : 0];
  seg.noise_sigma =
      c > 8 ? stddev(f, 0, c - 1) : floor_sigma;  // clean pre-contact window

  const int window = std::max<int>(3, static_cast<int>(n / 500));
  const std::vector<double> smooth = moving_average(f, window);

  // Release: last run of 3 raw samples above the floor, then the local decay
  // line extrapolated to its zero crossing.
  std::size_t r = c;
  for (std::size_t i = n; i-- > c + 2;) {
    if (f[i] > theta && f[i - 1] > theta && f[i - 2] > theta) {
      r = i;
      break;
    }
  }
  if (r <= c + 3) {
    throw TraceError("no-contact", "contact episode too short to segment");
  }
  {
    const std::size_t span = std::max<std::size_t>(
        30, 4 * static_cast<std::size_t>(std::max<int>(3, n / 500)));
    const std::size_t fit_lo =
        std::max(c, r - std::min<std::size_t>(r - c, span));
    const LineFit tail = fit_line(t, f, fit_lo, r);
    const double dt_local = t[r] - t[r - 1];
    seg.t2 = t[r];
    if (tail.slope < 0.0) {
      const double crossing = -tail.intercept / tail.slope;
      if (crossing > t[r] - 2.0 * dt_local) {
        seg.t2 = std::min(crossing, t[r] + 20.0 * dt_local);
      }
    }
  }

  // A sustained quiet gap inside [c, r] means several contact episodes.
  {
    const std::size_t min_gap =
        std::max<std::size_t>(5 * window, (r - c) / 20);
    std::size_t quiet = 0;
    for (std::size_t i = c; i <= r; ++i) {
      quiet = smooth[i] <= theta ? quiet + 1 : 0;
      if (quiet > min_gap) {
        throw TraceError("ambiguous", "multiple contact episodes in trace");
      }
    }
  }

  // Spike: contiguous region near contact well above the later force scale.
  const std::size_t quarter = c + (r - c) / 4;
  double plateau = 0.0;
  for (std::size_t i = quarter; i <= r; ++i) {
    plateau = std::max(plateau, smooth[i]);
  }
  std::size_t spike_end_idx = c;
  {
    const double spike_level = 1.5 * plateau;
    std::size_t i = c;
    while (i < quarter && smooth[i] <= spike_level) ++i;
    if (i < quarter) {  // inside the spike; walk to where it dies down
      while (i < quarter && smooth[i] > spike_level) ++i;
      spike_end_idx = std::min<std::size_t>(i + window, quarter);
    }
  }
  seg.spike_end = t[spike_end_idx];

  // Ramp line between the spike and the corner.
  const std::size_t corner_search_lo =
      std::min<std::size_t>(spike_end_idx + window, r - 1);
  std::size_t i_corner = corner_search_lo;
  for (std::size_t i = corner_search_lo; i <= r; ++i) {
    if (smooth[i] > smooth[i_corner]) {
      i_corner = i;
    }
  }
  // Fit the middle of the rise (20%..80% of the corner level), clear of both
  // the spike and the rounded corner.
  const double f_corner_est = smooth[i_corner];
  std::size_t ramp_lo = corner_search_lo;
  std::size_t ramp_hi = corner_search_lo;
  bool band_found = false;
  for (std::size_t i = corner_search_lo; i <= i_corner; ++i) {
    if (f[i] >= 0.2 * f_corner_est && f[i] <= 0.8 * f_corner_est) {
      if (!band_found) {
        ramp_lo = i;
        band_found = true;
      }
      ramp_hi = i;
    }
  }
  if (!band_found || ramp_hi <= ramp_lo + 2) {  // degenerate ramp
    ramp_lo = corner_search_lo;
    ramp_hi = i_corner;
  }
  const LineFit ramp = fit_line(t, f, ramp_lo, ramp_hi);
  seg.ramp_slope = ramp.slope;
  seg.ramp_intercept = ramp.intercept;

  // Decay quadratic past the corner.
  const std::size_t decay_lo =
      std::min(i_corner + std::max<std::size_t>(1, (r - i_corner) / 8), r - 1);
  const Eigen::Vector3d decay = fit_quadratic(t, f, decay_lo, r);
  seg.decay_quadratic = decay(2);

  // Corner: ramp line meets decay quadratic; prefer the root nearest the
  // smoothed maximum, fall back to the line reaching the plateau level.
  {
    const double qa = decay(2);
    const double qb = decay(1) - ramp.slope;
    const double qc = decay(0) - ramp.intercept;
    double t1 = ramp.slope > 0.0
                    ? (f_corner_est - ramp.intercept) / ramp.slope
                    : t[i_corner];
    const double disc = qb * qb - 4.0 * qa * qc;
    if (qa != 0.0 && disc >= 0.0) {
      const double root1 = (-qb + std::sqrt(disc)) / (2.0 * qa);
      const double root2 = (-qb - std::sqrt(disc)) / (2.0 * qa);
      const double ref = t[i_corner];
      double best = std::abs(root1 - ref) < std::abs(root2 - ref) ? root1
                                                                  : root2;
      if (best > seg.t_contact && best < seg.t2) {
        t1 = best;
      }
    }
    seg.t1 = t1;
  }
  seg.f_peak = ramp.slope * seg.t1 + ramp.intercept;

  // Momentum deposited by the spike: force above the ramp line.
  double spike_impulse = 0.0;
  for (std::size_t i = c; i < spike_end_idx; ++i) {
    const double above0 = f[i] - (ramp.slope * t[i] + ramp.intercept);
    const double above1 = f[i + 1] - (ramp.slope * t[i + 1] + ramp.intercept);
    spike_impulse += 0.5 * (above0 + above1) * (t[i + 1] - t[i]);
  }
  seg.spike_impulse = spike_impulse;

  if (!(seg.t_contact < seg.t1 && seg.t1 < seg.t2)) {
    throw TraceError("segmentation", "phase boundaries out of order");
  }
  return seg;
}

namespace {

// Piecewise collision force model shared by the fit stages. Parameters:
// (m_f, k_s, f_s, a); the spike contact stiffness equals the fixed k_m.
struct FitModel {
  double k_m = 0.0;
  double v_0 = 0.0;
  double t_contact = 0.0;

  double operator()(double t, const Eigen::Vector4d& theta) const {
    const double m_f = theta(0);
    const double k_s = theta(1);
    const double f_s = theta(2);
    const double a = theta(3);
    const double s = t - t_contact;
    if (s < 0.0) {
      return 0.0;
    }
    const double k_sense = k_m * k_s / (k_m + k_s);
    const double t1 = f_s / (k_sense * v_0);
    const double spike_duration = M_PI * std::sqrt(m_f / k_m);
    const double decay_duration = std::sqrt(2.0 * f_s / (a * k_m));

    double force = 0.0;
    if (s <= spike_duration) {
      force += 0.5 * v_0 * std::sqrt(m_f * k_m) *
               std::sin(M_PI * s / spike_duration);
    }
    if (s < t1) {
      force += k_sense * v_0 * s;
    } else if (s < t1 + decay_duration) {
      const double dt = s - t1;
      force += f_s - 0.5 * k_m * a * dt * dt;
    }
    return force;
  }
};

double cost_of(const std::vector<double>& residual) {
  double c = 0.0;
  for (double r : residual) c += r * r;
  return 0.5 * c;
}

void residuals(const ForceTrace& trace, const FitModel& model,
               const Eigen::Vector4d& theta, std::vector<double>& out) {
  out.resize(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out[i] = model(trace.t[i], theta) - trace.f[i];
  }
}

}  // namespace

FitResult fit_trace(const ForceTrace& trace, double k_m, double v_0) {
  if (!(k_m > 0.0) || !(v_0 > 0.0)) {
    throw DomainError("fit needs positive k_m and v_0");
  }
  const Segmentation seg = segment_trace(trace);

  // Stage 1: seeds from the segmentation.
  const double k_sense_init =
      std::clamp(seg.ramp_slope / v_0, 1e-9, 0.999 * k_m);
  double a_init = -2.0 * seg.decay_quadratic / k_m;
  if (!(a_init > 0.0) || !std::isfinite(a_init)) {
    const double decay_duration = std::max(seg.t2 - seg.t1, 1e-9);
    a_init = 2.0 * std::max(seg.f_peak, 1e-9) /
             (k_m * decay_duration * decay_duration);
  }
  const Eigen::Vector4d theta_init(std::max(seg.spike_impulse / v_0, 1e-9),
                                   k_m * k_sense_init / (k_m - k_sense_init),
                                   std::max(seg.f_peak, 1e-9), a_init);
  Eigen::Vector4d theta = theta_init;

  FitModel model{k_m, v_0, seg.t_contact};

  // Stage 2: damped least squares in log-parameter space (keeps every
  // estimate positive and scale-balanced).
  Eigen::Vector4d phi = theta.array().log();
  std::vector<double> res;
  std::vector<double> res_trial;
  residuals(trace, model, phi.array().exp(), res);
  double cost = cost_of(res);

  const int n = static_cast<int>(trace.size());
  Eigen::MatrixXd jac(n, 4);
  double lambda = 1e-3;
  bool converged = false;
  for (int iter = 0; iter < 250 && !converged; ++iter) {
    // Forward-difference Jacobian in log space.
    const double h = 1e-6;
    for (int j = 0; j < 4; ++j) {
      Eigen::Vector4d phi_j = phi;
      phi_j(j) += h;
      residuals(trace, model, phi_j.array().exp(), res_trial);
      for (int i = 0; i < n; ++i) {
        jac(i, j) = (res_trial[i] - res[i]) / h;
      }
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    for (int i = 0; i < n; ++i) {
      jtr += jac.row(i).transpose() * res[i];
    }

    // Damping floor keyed to the largest curvature so a locally insensitive
    // parameter cannot run away; log-space steps are additionally clamped.
    const double diag_floor = 1e-10 * jtj.diagonal().maxCoeff() + 1e-300;
    bool accepted = false;
    for (int attempt = 0; attempt < 25 && !accepted; ++attempt) {
      Eigen::Matrix4d damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(diag_floor);
      Eigen::Vector4d step = damped.ldlt().solve(-jtr);
      step = step.cwiseMax(-2.0).cwiseMin(2.0);
      residuals(trace, model, (phi + step).array().exp(), res_trial);
      const double trial_cost = cost_of(res_trial);
      if (trial_cost < cost) {
        const double improvement = cost - trial_cost;
        phi += step;
        res.swap(res_trial);
        cost = trial_cost;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        // Log-space steps below 3e-7 move every parameter by well under a
        // part per million; polishing further is noise.
        if (improvement <= 1e-10 * std::max(cost, 1e-300) ||
            step.cwiseAbs().maxCoeff() <= 3e-7) {
          converged = true;
        }
      } else {
        lambda = std::min(lambda * 10.0, 1e12);
      }
    }
    if (!accepted) {
      converged = true;  // no damping level improves the fit further
      break;
    }
  }

  // On non-convergence the contract is to hand back the stage-1 seeds with
  // the flag cleared, not a half-finished iterate.
  const Eigen::Vector4d theta_hat =
      converged ? Eigen::Vector4d(phi.array().exp()) : theta_init;
  if (!converged) {
    residuals(trace, model, theta_hat, res);
    cost = cost_of(res);
  }

  // Covariance from the residuals at the solution, with the Jacobian taken in
  // parameter (not log) space.
  Eigen::Vector4d sigma = Eigen::Vector4d::Zero();
  {
    residuals(trace, model, theta_hat, res);
    for (int j = 0; j < 4; ++j) {
      Eigen::Vector4d theta_j = theta_hat;
      const double h = std::max(1e-7 * std::abs(theta_hat(j)), 1e-14);
      theta_j(j) += h;
      residuals(trace, model, theta_j, res_trial);
      for (int i = 0; i < n; ++i) {
        jac(i, j) = (res_trial[i] - res[i]) / h;
      }
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const double dof = std::max(1, n - 4);
    const double s2 = 2.0 * cost / dof;
    const Eigen::Matrix4d cov = s2 * jtj.inverse();
    for (int j = 0; j < 4; ++j) {
      sigma(j) = cov(j, j) > 0.0 ? std::sqrt(cov(j, j)) : 0.0;
    }
  }

  FitResult out;
  out.m_f = theta_hat(0);
  out.k_s = theta_hat(1);
  out.f_s = theta_hat(2);
  out.a = theta_hat(3);
  out.sigma_m_f = sigma(0);
  out.sigma_k_s = sigma(1);
  out.sigma_f_s = sigma(2);
  out.sigma_a = sigma(3);
  out.k_m = k_m;
  out.residual_rms = std::sqrt(2.0 * cost / trace.size());
  out.converged = converged;
  return out;
}

ForceTrace synthesize_trace(const CollisionParams1D& p, const SimOptions& opt) {
  ForceTrace trace = simulate(p, opt).trace;
  if (opt.noise_sigma > 0.0) {
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> noise(0.0, opt.noise_sigma);
    for (double& f : trace.f) {
      f += noise(rng);
    }
  }
  trace.source = "synthetic";
  return trace;
}

}  // namespace reflex
