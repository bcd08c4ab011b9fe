#pragma once

#include <variant>

#include "reflex/errors.hpp"

namespace reflex {

// Collision detection schemes. A force threshold trips at a fixed contact
// force. A position-error threshold trips when the software spring is
// deflected by e_s, so the effective force threshold is k_s * e_s and scales
// with the controller stiffness.
struct ForceThreshold {
  double f_s = 0.0;  // [N]
};

struct PositionErrorThreshold {
  double e_s = 0.0;  // [m]
};

using SensingMode = std::variant<ForceThreshold, PositionErrorThreshold>;

// Full parameter set of the 1D finger/spring/robot collision model.
//
// The finger mass m_f is everything sprung between the compliance and the
// environment; the robot mass m_r lumps the unsprung structure, transmission,
// and reflected rotor inertia. The compliance between them combines the
// mechanical stiffness k_m with the software (controller) stiffness k_s.
struct CollisionParams1D {
  double m_f = 0.0;                     // finger (sprung) mass [kg]
  double m_r = 0.0;                     // robot (unsprung) mass [kg]
  double k_m = 0.0;                     // mechanical stiffness [N/m]
  double k_s = 0.0;                     // software stiffness [N/m], 0 = absent
  SensingMode sensing{ForceThreshold{}};
  double v_0 = 0.0;                     // pre-impact velocity [m/s]
  double f_a = 0.0;                     // reaction force capability [N]

  // Reaction acceleration of the robot mass away from the constraint.
  double acceleration() const { return f_a / m_r; }  // [m/s^2]
};

// Throws DomainError unless all required quantities are strictly positive
// (k_s may be zero) and the sensing threshold is well defined.
void validate(const CollisionParams1D& p);

// Per-phase impulses, phase times, and total impulse for one collision.
// `total` is the exact sum of the three phases.
struct PhaseBreakdown {
  double i_plastic = 0.0;   // plastic impact phase [N s]
  double i_sensing = 0.0;   // sensing phase [N s]
  double i_reaction = 0.0;  // reaction phase [N s]
  double total = 0.0;       // [N s]
  double t1 = 0.0;          // detection time after contact [s]
  double t2 = 0.0;          // release time after contact [s]
};

}  // namespace reflex
