#pragma once

#include "reflex/collision_params.hpp"

namespace reflex {

// Series combination of the mechanical and software springs. With k_s = 0 the
// software spring is absent and only the mechanical compliance acts.
double combined_stiffness(double k_m, double k_s);

// Force level at which the given sensing mode trips. Position-error
// thresholding requires a nonzero software stiffness to produce a force.
double effective_threshold(const SensingMode& mode, double k_s);

// Phase I->II: the finger dissipates all of its momentum against the
// constraint (plastic impact, zero restitution).
double plastic_impulse(double m_f, double v_0);

// Time for the velocity-controlled ramp k*v_0*t to reach the threshold f_s.
double sensing_time(double f_s, double k, double v_0);

// Phase II->III: area of the force ramp triangle, f_s^2 / (2 k v_0).
double sensing_impulse(double f_s, double k, double v_0);

// Duration of the retraction against the mechanical spring alone,
// sqrt(2 f_s / (a k_m)). Software gains are zeroed at detection, so only k_m
// has to be unloaded.
double reaction_duration(double f_s, double k_m, double a);

// Phase III->IV: integral of f_s - k_m*a*t^2/2 over the retraction,
// sqrt(8 f_s^3 / (9 a k_m)).
double reaction_impulse(double f_s, double k_m, double a);

// Total impulse transferred in the collision, split by phase. The sensing
// phase acts through the series spring combined_stiffness(k_m, k_s); the
// reaction phase acts through k_m alone.
PhaseBreakdown total_impulse(const CollisionParams1D& p);

// Pre-impact velocity minimizing the total impulse, f_s / sqrt(2 k m_f).
// The total is convex in v_0, so this is the unique minimum.
double optimal_velocity(double f_s, double k, double m_f);

// Total impulse evaluated at the optimal velocity.
double minimum_impulse(const CollisionParams1D& p);

}  // namespace reflex
