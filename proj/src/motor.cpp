#include "reflex/motor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace reflex {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void validate(const MotorSpec& m) {
  require_positive(m.stator_od, "stator_od");
  require_positive(m.stack_height, "stack_height");
  require_positive(m.rotor_inertia, "rotor_inertia");
  require_positive(m.tau_c, "tau_c");
  require_positive(m.tau_p, "tau_p");
  if (!(m.gear_ratio >= 1.0) || !std::isfinite(m.gear_ratio)) {
    throw DomainError("gear_ratio must be >= 1 and finite");
  }
  if (m.tau_p < m.tau_c) {
    throw DomainError("peak torque must be >= continuous torque");
  }
}

const std::vector<ScalingLaw>& builtin_laws() {
  static const std::vector<ScalingLaw> laws = {
      {"isometric", LawKind::kMotor, {1, 2, 0}, {1, 4, 0}, true, {1, 4, 0}},
      // Torque exponent assumes inertia and mass follow isometric scaling.
      {"empirical", LawKind::kMotor, {1, 2, 0}, {1, 4, 0}, true, {1, 2.8, 0}},
      {"quadruped", LawKind::kMotor, {1, 1, 0}, {1, 3, 0}, true, {1, 2, 0}},
      {"electrical-thermal",
       LawKind::kMotor,
       {1, 2, 0},
       {1, 4, 0},
       true,
       {1, 2.5, 0}},
      {"parallel-shaft",
       LawKind::kGearbox,
       {1, 2, 0},
       {1, 4, -1},
       true,
       {1, 2, -1}},
      {"planetary", LawKind::kGearbox, {1, 2, 0}, {1, 4, -1}, true, {1, 2, -1}},
      {"harmonic", LawKind::kGearbox, {1, 2, 0}, {1, 4, 0}, true, {0, 3, 0}},
      {"cycloidal", LawKind::kGearbox, {1, 2, 0}, {1, 4, 0}, true, {-1, 4, 0}},
      {"ball-screw", LawKind::kGearbox, {1, 2, 0}, {1, 4, 0}, false, {0, 3, 0}},
  };
  return laws;
}

const ScalingLaw& law_by_name(const std::string& name) {
  for (const auto& law : builtin_laws()) {
    if (law.name == name) {
      return law;
    }
  }
  throw DomainError("unknown scaling law: " + name);
}

MotorSpec scale_motor(const MotorSpec& reference, double new_od,
                      const ScalingLaw& law, double torque_floor) {
  validate(reference);
  require_positive(new_od, "new_od");
  require_positive(torque_floor, "torque_floor");
  if (reference.gear_ratio != 1.0) {
    throw DomainError("scaling reference must be direct drive (N = 1)");
  }

  const double ratio = new_od / reference.stator_od;
  const double torque_scale = std::pow(ratio, law.torque.r_exp);
  const double inertia_scale = std::pow(ratio, law.inertia.r_exp);
  if (!std::isfinite(torque_scale) || !std::isfinite(inertia_scale)) {
    throw DomainError("motor scaling produced non-finite values");
  }

  char od_label[32];
  std::snprintf(od_label, sizeof(od_label), "%g", new_od * 1e3);
  MotorSpec scaled;
  scaled.name = reference.name + "@" + od_label + "mm";
  scaled.stator_od = new_od;
  scaled.stack_height = reference.stack_height;
  scaled.rotor_inertia = reference.rotor_inertia * inertia_scale;
  scaled.tau_c = reference.tau_c * torque_scale;
  scaled.tau_p = reference.tau_p * torque_scale;
  scaled.gear_ratio = std::max(1.0, torque_floor / scaled.tau_p);
  validate(scaled);
  return scaled;
}

double reflected_mass_at_link(const MotorSpec& motor, double link_length) {
  require_positive(link_length, "link_length");
  return motor.reflected_inertia() / (link_length * link_length);
}

double force_capability_at_link(const MotorSpec& motor, double link_length) {
  require_positive(link_length, "link_length");
  return motor.output_peak_torque() / link_length;
}

const MotorSpec& motor_m1() {
  static const MotorSpec m{"m1", 10.0e-3, 12.5e-3, 1.71e-8,
                           5.94e-3, 1.47e-2, 88.18};
  return m;
}

const MotorSpec& motor_m2() {
  static const MotorSpec m{"m2", 60.0e-3, 12.5e-3, 2.21e-5, 0.524, 1.3, 1.0};
  return m;
}

const MotorSpec& motor_m3() {
  static const MotorSpec m{"m3", 100.0e-3, 12.5e-3, 1.71e-4,
                           1.879,    4.661,    1.0};
  return m;
}

const MotorSpec& motor_by_name(const std::string& name) {
  if (name == "m1") return motor_m1();
  if (name == "m2") return motor_m2();
  if (name == "m3") return motor_m3();
  throw DomainError("unknown built-in motor: " + name);
}

}  // namespace reflex
