#pragma once

#include "reflex/collision_sim.hpp"
#include "reflex/force_trace.hpp"

namespace reflex {

// Boundaries and fit seeds extracted from a single collision episode.
struct Segmentation {
  double t_contact = 0.0;  // first sustained rise above the noise floor [s]
  double t1 = 0.0;         // ramp/decay corner (detection) [s]
  double t2 = 0.0;         // return to the noise floor [s]

  double noise_sigma = 0.0;     // from the pre-contact window [N]
  double ramp_slope = 0.0;      // [N/s]
  double ramp_intercept = 0.0;  // [N]
  double f_peak = 0.0;          // force at the corner [N]
  double decay_quadratic = 0.0; // t^2 coefficient of the decay fit [N/s^2]
  double spike_impulse = 0.0;   // force above the ramp over the spike [N s]
  double spike_end = 0.0;       // [s]
};

// Locates contact, detection, and release in a collision trace. The noise
// floor is estimated from the first 5% of samples; the corner t1 is the
// intersection of a line fit to the ramp with a quadratic fit to the decay,
// which stays put under sample noise. Throws TraceError("no-contact") on
// quiet traces and TraceError("ambiguous") when several contact episodes are
// present.
Segmentation segment_trace(const ForceTrace& trace);

// One-shot model fit of a collision trace with the mechanical stiffness held
// fixed and the pre-impact velocity known.
struct FitResult {
  double m_f = 0.0;  // [kg]
  double k_s = 0.0;  // [N/m]
  double f_s = 0.0;  // [N]
  double a = 0.0;    // [m/s^2]
  double sigma_m_f = 0.0;
  double sigma_k_s = 0.0;
  double sigma_f_s = 0.0;
  double sigma_a = 0.0;
  double k_m = 0.0;          // fixed [N/m]
  double residual_rms = 0.0; // [N]
  bool converged = false;
};

// Two-stage estimation: seeds from segment_trace (slope -> k, peak -> f_s,
// decay curvature -> a, spike impulse -> m_f), then a damped least-squares
// refinement of the full piecewise force model against every sample.
// Parameter standard deviations come from the residual covariance. On
// non-convergence the seeds are returned with `converged = false`.
FitResult fit_trace(const ForceTrace& trace, double k_m, double v_0);

// Oracle trace plus seeded Gaussian sample noise of opt.noise_sigma.
ForceTrace synthesize_trace(const CollisionParams1D& p, const SimOptions& opt);

}  // namespace reflex
