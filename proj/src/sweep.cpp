#include "reflex/sweep.hpp"

#include <cmath>

#include "reflex/parallel.hpp"
#include "reflex/reflex_core.hpp"

namespace reflex {

const char* variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::kV0: return "v_0";
    case SweepVariable::kMotorRadius: return "r";
    case SweepVariable::kMechanicalStiffness: return "k_m";
    case SweepVariable::kSoftwareStiffness: return "k_s";
  }
  return "?";
}

SweepVariable variable_from_name(const std::string& name) {
  if (name == "v_0" || name == "v0") return SweepVariable::kV0;
  if (name == "r") return SweepVariable::kMotorRadius;
  if (name == "k_m") return SweepVariable::kMechanicalStiffness;
  if (name == "k_s") return SweepVariable::kSoftwareStiffness;
  throw DomainError("unknown sweep variable: " + name);
}

std::vector<double> axis_values(const SweepAxis& axis) {
  if (axis.count < 2) {
    throw DomainError("sweep axis needs at least 2 points");
  }
  if (!(axis.min < axis.max)) {
    throw DomainError("sweep axis needs min < max");
  }
  if (axis.log_spacing && !(axis.min > 0.0)) {
    throw DomainError("log-spaced axis needs a positive minimum");
  }
  std::vector<double> values(axis.count);
  for (int i = 0; i < axis.count; ++i) {
    const double s = static_cast<double>(i) / (axis.count - 1);
    values[i] = axis.log_spacing
                    ? axis.min * std::pow(axis.max / axis.min, s)
                    : axis.min + (axis.max - axis.min) * s;
  }
  return values;
}

void validate(const SweepGrid& grid) {
  if (grid.axes.empty() || grid.axes.size() > 2) {
    throw DomainError("sweep needs 1 or 2 axes");
  }
  for (const auto& axis : grid.axes) {
    axis_values(axis);  // validates bounds and count
    if (axis.variable == SweepVariable::kMotorRadius && !grid.motor) {
      throw DomainError("radius axis needs a motor scaling context");
    }
  }
  // The base parameters are not validated here: axes overwrite parts of
  // them, and whatever remains invalid at a grid point flags that row.
  if (grid.motor) {
    validate(grid.motor->reference);
    if (!(grid.motor->torque_floor > 0.0) || !(grid.motor->link_length > 0.0)) {
      throw DomainError("motor context needs positive floor and link length");
    }
  }
}

SweepResult run_sweep(const SweepGrid& grid) {
  validate(grid);

  std::vector<std::vector<double>> values;
  values.reserve(grid.axes.size());
  SweepResult result;
  for (const auto& axis : grid.axes) {
    values.push_back(axis_values(axis));
    result.axis_names.emplace_back(variable_name(axis.variable));
  }

  const std::size_t n_rows =
      values.size() == 2 ? values[0].size() * values[1].size()
                         : values[0].size();
  result.rows.resize(n_rows);

  parallel_for(n_rows, [&](std::size_t index) {
    SweepRow& row = result.rows[index];
    row.params = grid.base;

    if (values.size() == 2) {
      row.axis_values = {values[0][index / values[1].size()],
                         values[1][index % values[1].size()]};
    } else {
      row.axis_values = {values[0][index]};
    }

    try {
      for (std::size_t a = 0; a < grid.axes.size(); ++a) {
        const double value = row.axis_values[a];
        switch (grid.axes[a].variable) {
          case SweepVariable::kV0:
            row.params.v_0 = value;
            break;
          case SweepVariable::kMechanicalStiffness:
            row.params.k_m = value;
            break;
          case SweepVariable::kSoftwareStiffness:
            row.params.k_s = value;
            break;
          case SweepVariable::kMotorRadius: {
            const MotorScalingContext& ctx = *grid.motor;
            const MotorSpec scaled = scale_motor(ctx.reference, value, ctx.law,
                                                 ctx.torque_floor);
            row.params.m_f = grid.base.m_f +
                             reflected_mass_at_link(scaled, ctx.link_length);
            row.params.f_a = force_capability_at_link(scaled, ctx.link_length);
            break;
          }
        }
      }
      row.f_s = effective_threshold(row.params.sensing, row.params.k_s);
      row.breakdown = total_impulse(row.params);
      row.feasible = std::isfinite(row.breakdown.total);
    } catch (const DomainError&) {
      row.feasible = false;
      const double nan = std::nan("");
      row.f_s = nan;
      row.breakdown = PhaseBreakdown{nan, nan, nan, nan, nan, nan};
    }
  });

  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (!result.rows[i].feasible) {
      continue;
    }
    if (result.argmin < 0 ||
        result.rows[i].breakdown.total <
            result.rows[result.argmin].breakdown.total) {
      result.argmin = static_cast<std::ptrdiff_t>(i);
    }
  }
  return result;
}

}  // namespace reflex
