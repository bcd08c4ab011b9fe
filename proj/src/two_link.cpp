#include "reflex/two_link.hpp"

#include <cmath>
#include <limits>

#include "reflex/parallel.hpp"
#include "reflex/reflex_core.hpp"

namespace reflex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

// Relative determinant guard below which J is treated as singular.
double singular_guard(const TwoLinkModel& model) {
  return 1e-9 * model.l1 * model.l2;
}

Eigen::Matrix2d checked_jacobian(const TwoLinkModel& model,
                                 const Configuration& q) {
  const Eigen::Matrix2d j = jacobian(model, q);
  if (std::abs(j.determinant()) <= singular_guard(model)) {
    throw SingularConfiguration("configuration is kinematically singular");
  }
  return j;
}

Eigen::Matrix2d selected_inertia(const TwoLinkModel& model,
                                 const Configuration& q,
                                 InertiaSelector selector) {
  switch (selector) {
    case InertiaSelector::kStructure:
      return mass_matrix(model, q);
    case InertiaSelector::kActuators:
      return model.joint_inertia.asDiagonal();
    case InertiaSelector::kFull:
      return full_mass_matrix(model, q);
  }
  throw DomainError("invalid inertia selector");
}

}  // namespace

LinkParams uniform_rod(double mass, double length) {
  return LinkParams{mass, 0.5 * length, mass * length * length / 3.0};
}

void validate(const TwoLinkModel& model) {
  require_positive(model.l1, "l1");
  require_positive(model.l2, "l2");
  require_positive(model.link1.mass, "link1.mass");
  require_positive(model.link2.mass, "link2.mass");
  if (model.link1.com_offset < 0.0 || model.link2.com_offset < 0.0 ||
      model.link1.inertia_about_joint < 0.0 ||
      model.link2.inertia_about_joint < 0.0) {
    throw DomainError("link COM offsets and inertias must be non-negative");
  }
  require_positive(model.joint_inertia(0), "joint_inertia[0]");
  require_positive(model.joint_inertia(1), "joint_inertia[1]");
  require_positive(model.joint_stiffness(0), "joint_stiffness[0]");
  require_positive(model.joint_stiffness(1), "joint_stiffness[1]");
  require_positive(model.tau_max(0), "tau_max[0]");
  require_positive(model.tau_max(1), "tau_max[1]");
  require_positive(model.contact_stiffness, "contact_stiffness");
}

TwoLinkModel default_two_link() {
  TwoLinkModel model;
  model.l1 = 0.15;
  model.l2 = 0.15;
  model.link1 = uniform_rod(0.2, model.l1);
  model.link2 = uniform_rod(0.2, model.l2);
  set_joint_motor(model, 0, motor_m2());
  set_joint_motor(model, 1, motor_m2());
  model.joint_stiffness = Eigen::Vector2d(100.0, 100.0);
  model.contact_stiffness = 2.0e7;
  return model;
}

void set_joint_motor(TwoLinkModel& model, int joint, const MotorSpec& motor) {
  if (joint < 0 || joint > 1) {
    throw DomainError("joint index must be 0 or 1");
  }
  model.joint_inertia(joint) = motor.reflected_inertia();
  model.tau_max(joint) = motor.output_peak_torque();
}

Eigen::Matrix2d mass_matrix(const TwoLinkModel& model, const Configuration& q) {
  // Classical planar 2R form with per-link inertia referred to the link's own
  // joint; only q2 enters.
  const double c2 = std::cos(q.q2);
  const double m2 = model.link2.mass;
  const double lc2 = model.link2.com_offset;
  const double i1 = model.link1.inertia_about_joint;
  const double i2 = model.link2.inertia_about_joint;
  const double coupling = m2 * model.l1 * lc2 * c2;

  Eigen::Matrix2d m;
  m(0, 0) = i1 + i2 + m2 * model.l1 * model.l1 + 2.0 * coupling;
  m(0, 1) = i2 + coupling;
  m(1, 0) = m(0, 1);
  m(1, 1) = i2;
  return m;
}

Eigen::Matrix2d full_mass_matrix(const TwoLinkModel& model,
                                 const Configuration& q) {
  Eigen::Matrix2d m = mass_matrix(model, q);
  m.diagonal() += model.joint_inertia;
  return m;
}

Eigen::Matrix2d jacobian(const TwoLinkModel& model, const Configuration& q) {
  const double s1 = std::sin(q.q1);
  const double c1 = std::cos(q.q1);
  const double s12 = std::sin(q.q1 + q.q2);
  const double c12 = std::cos(q.q1 + q.q2);

  Eigen::Matrix2d j;
  j(0, 0) = -model.l1 * s1 - model.l2 * s12;
  j(0, 1) = -model.l2 * s12;
  j(1, 0) = model.l1 * c1 + model.l2 * c12;
  j(1, 1) = model.l2 * c12;
  return j;
}

Eigen::Vector2d end_effector(const TwoLinkModel& model,
                             const Configuration& q) {
  const double c1 = std::cos(q.q1);
  const double s1 = std::sin(q.q1);
  const double c12 = std::cos(q.q1 + q.q2);
  const double s12 = std::sin(q.q1 + q.q2);
  return {model.l1 * c1 + model.l2 * c12, model.l1 * s1 + model.l2 * s12};
}

Eigen::Matrix2d gie(const TwoLinkModel& model, const Configuration& q) {
  validate(model);
  const Eigen::Matrix2d j_inv = checked_jacobian(model, q).inverse();
  return j_inv.transpose() * full_mass_matrix(model, q) * j_inv;
}

Eigen::Matrix2d dme(const TwoLinkModel& model, const Configuration& q) {
  validate(model);
  const Eigen::Matrix2d j = jacobian(model, q);
  const Eigen::Matrix2d m = full_mass_matrix(model, q);
  return j * (m.transpose() * m).inverse() * j.transpose();
}

double effective_mass(const TwoLinkModel& model, const Configuration& q,
                      const Eigen::Vector2d& u, InertiaSelector selector) {
  const Eigen::Matrix2d j = jacobian(model, q);
  const Eigen::Matrix2d m = selected_inertia(model, q, selector);
  const Eigen::Matrix2d m_inv = m.inverse();
  const Eigen::Vector2d w = j.transpose() * u;
  const double mobility = w.dot(m_inv * w);

  if (!std::isfinite(mobility)) {
    throw DomainError("selected inertia matrix is singular");
  }
  // Dynamically locked direction: no joint motion can move the contact along
  // u, so the effective mass diverges.
  const double locked_tol = 1e-14 * j.squaredNorm() * m_inv.norm();
  if (mobility <= locked_tol) {
    return kInf;
  }
  return 1.0 / mobility;
}

double task_stiffness(const TwoLinkModel& model, const Configuration& q,
                      const Eigen::Vector2d& u) {
  const Eigen::Matrix2d j = checked_jacobian(model, q);
  const Eigen::Vector2d dq = j.inverse() * u;
  return dq.dot(model.joint_stiffness.asDiagonal() * dq);
}

double task_acceleration(const TwoLinkModel& model, const Configuration& q,
                         const Eigen::Vector2d& u, double m_r,
                         SaturationMode mode) {
  require_positive(m_r, "m_r");
  const Eigen::Matrix2d j = checked_jacobian(model, q);
  const Eigen::Vector2d lever = j.transpose() * u;

  if (mode == SaturationMode::kLiteral) {
    const Eigen::Vector2d sat =
        lever.cwiseMax(-model.tau_max).cwiseMin(model.tau_max);
    const Eigen::Vector2d f = j.transpose().inverse() * sat;
    return u.dot(f) / m_r;
  }

  // Scaled saturation: largest alpha with |alpha * lever_i| <= tau_max_i.
  // A vanishing lever leaves that joint unconstrained.
  double alpha = kInf;
  for (int i = 0; i < 2; ++i) {
    if (lever(i) != 0.0) {
      alpha = std::min(alpha, model.tau_max(i) / std::abs(lever(i)));
    }
  }
  return alpha / m_r;
}

double imf(const TwoLinkModel& model, const Configuration& q) {
  const Eigen::Matrix2d j_inv = checked_jacobian(model, q).inverse();
  // Springs transmit no impulse, so the free system responds with the
  // structure inertia alone; locking the joints rigidly couples the reflected
  // actuator inertia on top of it.
  const Eigen::Matrix2d lambda =
      j_inv.transpose() * mass_matrix(model, q) * j_inv;
  const Eigen::Matrix2d lambda_locked =
      j_inv.transpose() * full_mass_matrix(model, q) * j_inv;
  const Eigen::Matrix2d mitigation =
      Eigen::Matrix2d::Identity() - lambda * lambda_locked.inverse();
  return mitigation.determinant();
}

void validate(const ContactSpec& contact) {
  if (std::abs(contact.u.norm() - 1.0) > 1e-12) {
    throw DomainError("collision direction must be a unit vector");
  }
  require_positive(contact.v_0, "v_0");
  require_positive(contact.f_s, "f_s");
}

CollisionParams1D reduce_to_1d(const TwoLinkModel& model,
                               const Configuration& q,
                               const ContactSpec& contact) {
  validate(model);
  validate(contact);

  const double k_proj = task_stiffness(model, q, contact.u);
  const double m_f =
      effective_mass(model, q, contact.u, InertiaSelector::kStructure);
  const double m_r =
      effective_mass(model, q, contact.u, InertiaSelector::kActuators);

  CollisionParams1D p;
  p.m_f = m_f;
  p.m_r = m_r;
  p.k_m = model.contact_stiffness;
  p.v_0 = contact.v_0;
  p.sensing = ForceThreshold{contact.f_s};

  if (std::isfinite(m_r)) {
    p.f_a = m_r * task_acceleration(model, q, contact.u, m_r);
  } else {
    p.f_a = kInf;
  }

  switch (model.sensing_rule) {
    case SensingStiffnessRule::kSeriesWithContact:
      p.k_s = k_proj;
      break;
    case SensingStiffnessRule::kProjectionOnly:
      // Pre-compensate the downstream series combination so the sensing-phase
      // spring equals the projected joint stiffness itself.
      if (k_proj >= model.contact_stiffness) {
        throw DomainError(
            "projected joint stiffness exceeds the contact stiffness; use "
            "the series sensing rule");
      }
      p.k_s = model.contact_stiffness * k_proj /
              (model.contact_stiffness - k_proj);
      break;
  }
  return p;
}

ReflexSurface reflex_surface(const TwoLinkModel& model, const Configuration& q,
                             double v_0, double f_s, int n) {
  validate(model);
  if (n < 8) {
    throw DomainError("surface needs at least 8 directions");
  }
  require_positive(v_0, "v_0");
  require_positive(f_s, "f_s");

  ReflexSurface surface;
  surface.points.resize(n);
  const double step = 2.0 * M_PI / n;
  const bool mirrored = (n % 2) == 0;

  // Directions first: the second half-turn negates the first (for even n),
  // which keeps the quadratic forms bit-identical under u -> -u.
  for (int i = 0; i < n; ++i) {
    SurfacePoint& point = surface.points[i];
    point.theta = step * i;
    if (mirrored && i >= n / 2) {
      point.u = -surface.points[i - n / 2].u;
    } else {
      point.u = Eigen::Vector2d(std::cos(point.theta), std::sin(point.theta));
    }
  }

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    SurfacePoint& point = surface.points[i];
    try {
      ContactSpec contact{point.u, v_0, f_s};
      const CollisionParams1D params = reduce_to_1d(model, q, contact);
      point.params = params;
      if (!std::isfinite(params.m_f) || !std::isfinite(params.m_r) ||
          !std::isfinite(params.f_a)) {
        point.flag = SurfacePointFlag::kInfinite;
        return;
      }
      point.breakdown = total_impulse(params);
      point.flag = SurfacePointFlag::kOk;
    } catch (const SingularConfiguration&) {
      point.flag = SurfacePointFlag::kSingular;
    } catch (const DomainError&) {
      point.flag = SurfacePointFlag::kInfinite;
    }
  });
  return surface;
}

}  // namespace reflex
