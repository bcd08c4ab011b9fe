#include "reflex/reflex_core.hpp"

#include <cmath>

namespace reflex {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

void require_non_negative(double value, const char* name) {
  if (value < 0.0 || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be non-negative and finite");
  }
}

}  // namespace

void validate(const CollisionParams1D& p) {
  require_positive(p.m_f, "m_f");
  require_positive(p.m_r, "m_r");
  require_positive(p.k_m, "k_m");
  require_non_negative(p.k_s, "k_s");
  require_positive(p.v_0, "v_0");
  require_positive(p.f_a, "f_a");
  // Also checks the sensing mode itself (positive threshold, and a software
  // spring when thresholding on position error).
  effective_threshold(p.sensing, p.k_s);
}

double combined_stiffness(double k_m, double k_s) {
  require_positive(k_m, "k_m");
  require_non_negative(k_s, "k_s");
  if (k_s == 0.0) {
    return k_m;
  }
  return k_m * k_s / (k_m + k_s);
}

double effective_threshold(const SensingMode& mode, double k_s) {
  if (const auto* force = std::get_if<ForceThreshold>(&mode)) {
    require_positive(force->f_s, "f_s");
    return force->f_s;
  }
  const auto& pos = std::get<PositionErrorThreshold>(mode);
  require_positive(pos.e_s, "e_s");
  if (!(k_s > 0.0)) {
    throw DomainError(
        "position-error thresholding needs a nonzero software stiffness");
  }
  return k_s * pos.e_s;
}

double plastic_impulse(double m_f, double v_0) {
  require_non_negative(m_f, "m_f");
  require_non_negative(v_0, "v_0");
  return m_f * v_0;
}

double sensing_time(double f_s, double k, double v_0) {
  require_positive(f_s, "f_s");
  require_positive(k, "k");
  require_positive(v_0, "v_0");
  return f_s / (k * v_0);
}

double sensing_impulse(double f_s, double k, double v_0) {
  require_positive(f_s, "f_s");
  require_positive(k, "k");
  require_positive(v_0, "v_0");
  return f_s * f_s / (2.0 * k * v_0);
}

double reaction_duration(double f_s, double k_m, double a) {
  require_positive(f_s, "f_s");
  require_positive(k_m, "k_m");
  require_positive(a, "a");
  return std::sqrt(2.0 * f_s / (a * k_m));
}

double reaction_impulse(double f_s, double k_m, double a) {
  if (f_s == 0.0) {
    return 0.0;
  }
  require_positive(f_s, "f_s");
  require_positive(k_m, "k_m");
  require_positive(a, "a");
  return std::sqrt(8.0 * f_s * f_s * f_s / (9.0 * a * k_m));
}

PhaseBreakdown total_impulse(const CollisionParams1D& p) {
  validate(p);
  const double f_s = effective_threshold(p.sensing, p.k_s);
  const double k = combined_stiffness(p.k_m, p.k_s);
  const double a = p.acceleration();

  PhaseBreakdown out;
  out.i_plastic = plastic_impulse(p.m_f, p.v_0);
  out.i_sensing = sensing_impulse(f_s, k, p.v_0);
  out.i_reaction = reaction_impulse(f_s, p.k_m, a);
  out.total = out.i_plastic + out.i_sensing + out.i_reaction;
  out.t1 = sensing_time(f_s, k, p.v_0);
  out.t2 = out.t1 + reaction_duration(f_s, p.k_m, a);
  return out;
}

double optimal_velocity(double f_s, double k, double m_f) {
  require_positive(f_s, "f_s");
  require_positive(k, "k");
  require_positive(m_f, "m_f");
  return f_s / std::sqrt(2.0 * k * m_f);
}

double minimum_impulse(const CollisionParams1D& p) {
  validate(p);
  const double f_s = effective_threshold(p.sensing, p.k_s);
  const double k = combined_stiffness(p.k_m, p.k_s);
  CollisionParams1D at_optimum = p;
  at_optimum.v_0 = optimal_velocity(f_s, k, p.m_f);
  return total_impulse(at_optimum).total;
}

}  // namespace reflex
