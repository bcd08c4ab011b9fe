#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "reflex/collision_params.hpp"
#include "reflex/motor.hpp"

namespace reflex {

// Inertial description of one link, referred to its own joint axis.
struct LinkParams {
  double mass = 0.0;                // [kg]
  double com_offset = 0.0;          // distance joint -> COM [m]
  double inertia_about_joint = 0.0; // [kg m^2]
};

// Uniform slender rod of the given mass and length, pivoted at one end.
LinkParams uniform_rod(double mass, double length);

// How the sensing-phase stiffness of a reduced contact is assembled from the
// projected joint stiffness and the scalar contact stiffness.
enum class SensingStiffnessRule {
  kProjectionOnly,    // sensing spring = projected joint stiffness
  kSeriesWithContact, // sensing spring = series(contact k_m, projection)
};

// Planar 2R manipulator with per-joint reflected actuator inertias, joint
// stiffnesses (software springs), and torque limits. `contact_stiffness` is
// the scalar mechanical stiffness at the contact, which governs the reaction
// phase of a reduced collision.
struct TwoLinkModel {
  double l1 = 0.0;  // [m]
  double l2 = 0.0;  // [m]
  LinkParams link1;
  LinkParams link2;
  Eigen::Vector2d joint_inertia{0.0, 0.0};    // reflected, per joint [kg m^2]
  Eigen::Vector2d joint_stiffness{0.0, 0.0};  // [N m / rad]
  Eigen::Vector2d tau_max{0.0, 0.0};          // [N m]
  double contact_stiffness = 2.0e7;           // [N/m]
  SensingStiffnessRule sensing_rule = SensingStiffnessRule::kProjectionOnly;
};

void validate(const TwoLinkModel& model);

// Default study model: two 0.15 m / 0.2 kg rods, the built-in 60 mm motor at
// each joint, 100 N m/rad software stiffness per joint, and a stiff
// (sensor-dominated) contact.
TwoLinkModel default_two_link();

// Fits the model's joint actuators and torque limits from motors. Reflected
// inertia comes from N^2 J_m and the limit from the output peak torque.
void set_joint_motor(TwoLinkModel& model, int joint, const MotorSpec& motor);

struct Configuration {
  double q1 = 0.0;   // [rad]
  double q2 = 0.0;   // [rad]
  double dq1 = 0.0;  // [rad/s], kept for trace replay; unused by the metrics
  double dq2 = 0.0;  // [rad/s]
};

// Which inertia enters a task-space projection.
enum class InertiaSelector {
  kStructure,  // links only (M_bb)
  kActuators,  // reflected joint actuator inertias (M_jj)
  kFull,       // rigidly coupled structure + actuators
};

// Structure mass matrix M_bb(q) of the two links (actuators excluded).
// Symmetric; positive definite for valid models; depends on q only via q2.
Eigen::Matrix2d mass_matrix(const TwoLinkModel& model, const Configuration& q);

// Full rigid mass matrix: M_bb(q) + diag(joint_inertia).
Eigen::Matrix2d full_mass_matrix(const TwoLinkModel& model,
                                 const Configuration& q);

// End-effector Jacobian J_c(q); det(J) = l1 l2 sin(q2).
Eigen::Matrix2d jacobian(const TwoLinkModel& model, const Configuration& q);

// End-effector position, for geometry helpers and tests.
Eigen::Vector2d end_effector(const TwoLinkModel& model, const Configuration& q);

// Generalized inertia ellipsoid matrix J^-T (M_bb + M_jj) J^-1: resistance to
// changing the end-effector velocity. Throws SingularConfiguration.
Eigen::Matrix2d gie(const TwoLinkModel& model, const Configuration& q);

// Dynamic manipulability ellipsoid matrix J (M^T M)^-1 J^T with the full
// rigid M: ease of changing the end-effector velocity per unit joint torque.
// Never needs J^-1, so it is defined at singularities (rank-deficient there).
Eigen::Matrix2d dme(const TwoLinkModel& model, const Configuration& q);

// Directional effective mass (u^T J M^-1 J^T u)^-1 for the selected inertia.
// Returns +infinity when the direction is dynamically locked (for example the
// arm axis at q2 = 0); never throws for finite inputs.
double effective_mass(const TwoLinkModel& model, const Configuration& q,
                      const Eigen::Vector2d& u, InertiaSelector selector);

// Task-space stiffness u^T (J^-T K J^-1) u of the joint springs.
// Throws SingularConfiguration.
double task_stiffness(const TwoLinkModel& model, const Configuration& q,
                      const Eigen::Vector2d& u);

enum class SaturationMode {
  // Largest task-force magnitude along u whose joint torques respect the
  // limits, divided by m_r: a = min_i(tau_max_i / |(J^T u)_i|) / m_r.
  kScaled,
  // Literal component-wise clamp: a = u^T J^-T sat(J^T u) / m_r.
  kLiteral,
};

// Task-space acceleration capability along u for a robot mass m_r.
// Joints with a vanishing lever (J^T u)_i do not constrain the scaled form.
double task_acceleration(const TwoLinkModel& model, const Configuration& q,
                         const Eigen::Vector2d& u, double m_r,
                         SaturationMode mode = SaturationMode::kScaled);

// Impact mitigation factor det(I - Lambda Lambda_l^-1) in [0, 1], comparing
// the impulsive inertia of the spring-decoupled system (structure only,
// springs transmit no impulse) against the joint-locked composite
// (structure + reflected actuator inertia). 0 when the actuators add nothing
// to lock; 1 when the structure vanishes next to them.
double imf(const TwoLinkModel& model, const Configuration& q);

// Collision direction and pre-impact conditions at the end-effector.
struct ContactSpec {
  Eigen::Vector2d u{1.0, 0.0};  // unit collision direction
  double v_0 = 0.0;             // [m/s]
  double f_s = 0.0;             // sensing threshold [N]
};

void validate(const ContactSpec& contact);

// Projects the manipulator onto the 1D collision model along the contact
// direction: m_f from the structure, m_r from the actuators, the sensing
// spring from the projected joint stiffness, f_a from the torque limits, and
// the reaction spring from the scalar contact stiffness.
// Throws SingularConfiguration; a dynamically locked direction propagates as
// an infinite m_f, flagged by the caller.
CollisionParams1D reduce_to_1d(const TwoLinkModel& model,
                               const Configuration& q,
                               const ContactSpec& contact);

enum class SurfacePointFlag { kOk, kSingular, kInfinite };

struct SurfacePoint {
  double theta = 0.0;
  Eigen::Vector2d u{1.0, 0.0};
  SurfacePointFlag flag = SurfacePointFlag::kOk;
  std::optional<CollisionParams1D> params;
  std::optional<PhaseBreakdown> breakdown;
};

// Collision reflex surface: total impulse for n equally spaced collision
// directions around the end-effector. Directions in the second half-turn are
// the exact negations of the first half (for even n), so the period-pi
// symmetry of the quadratic forms is preserved bit for bit. Singular or
// locked directions are flagged, not fatal.
struct ReflexSurface {
  std::vector<SurfacePoint> points;
};

ReflexSurface reflex_surface(const TwoLinkModel& model, const Configuration& q,
                             double v_0, double f_s, int n = 360);

}  // namespace reflex
