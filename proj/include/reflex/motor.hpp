#pragma once

#include <string>
#include <vector>

#include "reflex/errors.hpp"

namespace reflex {

// Geometric and electromagnetic description of one actuator. `stator_od` is
// the stator outer diameter; scaling only ever uses ratios of it, so the
// OD-vs-radius convention cancels.
struct MotorSpec {
  std::string name;
  double stator_od = 0.0;     // [m]
  double stack_height = 0.0;  // [m]
  double rotor_inertia = 0.0; // J_m [kg m^2]
  double tau_c = 0.0;         // continuous torque [N m]
  double tau_p = 0.0;         // peak torque [N m]
  double gear_ratio = 1.0;    // N, >= 1, may be non-integer

  double reflected_inertia() const {  // N^2 * J_m [kg m^2]
    return gear_ratio * gear_ratio * rotor_inertia;
  }
  double output_peak_torque() const {  // N * tau_p [N m]
    return gear_ratio * tau_p;
  }
};

void validate(const MotorSpec& m);

// One power-law exponent set: quantity ~ l^l_exp * r^r_exp * stages^stage_exp.
struct LawExponents {
  double l_exp = 0.0;
  double r_exp = 0.0;
  double stage_exp = 0.0;
};

enum class LawKind { kMotor, kGearbox };

// A scaling law row: how mass, reflected inertia, and torque grow with the
// length l and radius r of a motor or gearbox. Reflected inertia additionally
// carries the N^2 factor for every row except ball screws.
struct ScalingLaw {
  std::string name;
  LawKind kind = LawKind::kMotor;
  LawExponents mass;
  LawExponents inertia;  // rotor inertia before the N^2 (or none) factor
  bool inertia_uses_n2 = true;
  LawExponents torque;
};

// All built-in scaling laws: four motor laws (isometric, empirical, quadruped
// design, electrical & thermal) and five gearbox laws (parallel shaft,
// planetary, harmonic, cycloidal, ball screw).
const std::vector<ScalingLaw>& builtin_laws();

// Lookup by name; throws DomainError for unknown names.
const ScalingLaw& law_by_name(const std::string& name);

// Scale `reference` (which must be direct drive, N = 1) to a new stator OD,
// keeping the stack height constant. Rotor inertia and torques follow the
// law's radius exponents; a gear ratio N = max(1, torque_floor / tau_p) is
// added so the output peak torque still meets `torque_floor`.
MotorSpec scale_motor(const MotorSpec& reference, double new_od,
                      const ScalingLaw& law, double torque_floor);

// Equivalent translational mass of the reflected rotor inertia at a contact
// moving on a lever of `link_length`: N^2 J_m / L^2.
double reflected_mass_at_link(const MotorSpec& motor, double link_length);

// Peak force the actuator can exert at the same lever: N tau_p / L.
double force_capability_at_link(const MotorSpec& motor, double link_length);

// Built-in reference motors: a 60 mm frameless direct-drive motor (Celera
// Motion Omni+ OPN-060-013-A) and its 10 mm / 100 mm scalings.
const MotorSpec& motor_m1();
const MotorSpec& motor_m2();
const MotorSpec& motor_m3();
const MotorSpec& motor_by_name(const std::string& name);

}  // namespace reflex
