#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reflex/collision_params.hpp"
#include "reflex/motor.hpp"

namespace reflex {

enum class SweepVariable { kV0, kMotorRadius, kMechanicalStiffness,
                           kSoftwareStiffness };

const char* variable_name(SweepVariable v);
SweepVariable variable_from_name(const std::string& name);

struct SweepAxis {
  SweepVariable variable = SweepVariable::kV0;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool log_spacing = false;
};

std::vector<double> axis_values(const SweepAxis& axis);

// Motor synthesis context for radius axes: each grid radius is scaled from
// the reference, the reflected rotor mass at the link is added to the base
// finger mass, and the reaction force capability comes from the output
// torque over the same lever.
struct MotorScalingContext {
  MotorSpec reference;
  ScalingLaw law;
  double torque_floor = 0.0;  // output torque requirement [N m]
  double link_length = 0.0;   // contact lever [m]
};

struct SweepGrid {
  std::vector<SweepAxis> axes;  // 1 or 2 axes
  CollisionParams1D base;
  std::optional<MotorScalingContext> motor;  // required for radius axes
};

void validate(const SweepGrid& grid);

struct SweepRow {
  std::vector<double> axis_values;
  CollisionParams1D params;  // effective parameters at this grid point
  double f_s = 0.0;          // resolved sensing threshold [N]
  PhaseBreakdown breakdown;
  bool feasible = false;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<SweepRow> rows;       // row-major over the axes, order fixed
  std::ptrdiff_t argmin = -1;       // feasible row with the least total
};

// Evaluates the closed-form breakdown over the grid. The sensing threshold is
// re-resolved per row, so position-error thresholding tracks a swept k_s.
// Rows whose parameters are invalid are flagged infeasible, never fatal.
// Rows may be evaluated in parallel; their order is fixed by the grid.
SweepResult run_sweep(const SweepGrid& grid);

}  // namespace reflex
