#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "quatslide/dynamics.hpp"
#include "quatslide/sliding.hpp"
#include "quatslide/trajectory.hpp"

namespace quatslide {

enum class ControlMode {
  JointSpace,      // Slotine-Li on a joint reference
  TaskLocal,       // task-space IK torque control, end-effector-frame s_q
  TaskGlobal,      // same, inertial-frame s_q
  TaskNaiveNoSgn,  // TaskLocal with sgn(q_e°) replaced by +1 (unwinding baseline)
};

std::string_view to_string(ControlMode mode);
/// Accepts "joint_space", "task_local", "task_global", "task_naive_no_sgn".
std::optional<ControlMode> parse_control_mode(std::string_view name);

inline constexpr double kDefaultConditionAbort = 1e6;
inline constexpr double kDefaultGainScale = 20.0;

struct ControllerConfig {
  ControlMode mode = ControlMode::TaskLocal;
  Gains gains;
  Matrix6d K = Matrix6d::Identity();
  double cond_abort = kDefaultConditionAbort;

  /// Throws ConfigError unless gains are positive, K is symmetric positive
  /// definite and cond_abort >= 1.
  void validate() const;
};

/// K = scale * diag(H(0)): uniform s-dynamics bandwidth across joints at the
/// home configuration.
Matrix6d default_gain_matrix(const ManipulatorModel& model, double scale = kDefaultGainScale);

struct ReferenceVelocity {
  JointVector theta_dot_r = JointVector::Zero();
  JointVector theta_ddot_r = JointVector::Zero();
};

struct JointControlOutput {
  JointVector tau;
  JointVector s_theta;
  ReferenceVelocity ref;
};

/// tau = H th_dd_r + C th_d_r + g - K s_theta with
///   th_d_r = th_d_d - lambda (th - th_d), th_dd_r = th_dd_d - lambda (th_d - th_d_d),
///   s_theta = th_d - th_d_r.
JointControlOutput slotine_li_joint(const ManipulatorModel& model, const JointState& state,
                                    const JointReference& reference, const ControllerConfig& cfg);

/// Everything the task controller needs from the current joint state.
struct TaskKinematics {
  Vec3 p = Vec3::Zero();
  UnitQuaternion q;
  RotMat3 R = RotMat3::Identity();
  Vec3 v = Vec3::Zero();
  Vec3 omega = Vec3::Zero();  // end-effector frame
  Matrix6d J = Matrix6d::Identity();  // angular rows in end-effector frame
  double condition = 1.0;
};

/// q is the FK quaternion, optionally sign-aligned with `previous_q` so a
/// simulated orientation path stays continuous on S3.
TaskKinematics task_kinematics(const ManipulatorModel& model, const JointState& state,
                               const std::optional<UnitQuaternion>& previous_q = std::nullopt);

/// Task-space errors and sliding variables for the given mode (s_q is the
/// inertial-frame variable for TaskGlobal). Needs no linear solve, so it is
/// also usable for logging at a singular configuration.
struct TaskErrors {
  OrientationError orientation;
  PositionError position;
  SlidingVariables sliding;
  RotMat3 R_d = RotMat3::Identity();
};

TaskErrors task_errors(const TaskKinematics& kin, const TaskReference& reference,
                       const ControllerConfig& cfg);

/// Solves J th_d_r = [v_d - sigma p_e; w_r] where w_r is
///   TaskLocal:      R_e^T omega_d - 2 lambda sgn(q_e°) vec(q_e)
///   TaskGlobal:     R^T (omega_d - 2 lambda sgn(q_e°) R_d vec(q_e))   (inertial omega_d)
///   TaskNaiveNoSgn: R_e^T omega_d - 2 lambda vec(q_e)
/// Throws SingularJacobian when kin.condition > cfg.cond_abort.
JointVector theta_dot_r_task(const TaskKinematics& kin, const TaskReference& reference,
                             const ControllerConfig& cfg);

/// Backward difference (current - previous) / dt; zero without a previous value.
JointVector theta_ddot_r_numeric(const std::optional<ReferenceVelocity>& previous,
                                 const JointVector& theta_dot_r, double dt);

struct IkTorqueOutput {
  JointVector tau;
  TaskErrors errors;
  ReferenceVelocity ref;
  JointVector s_theta;
  /// ||J_f (th_d - th_d_r) - [s_p; s_q]||_inf with J_f the Jacobian in the
  /// mode's angular frame.
  double identity_residual = 0.0;
};

/// tau = H th_dd_r + C th_d_r + g - K J^{-1} [s_p; s_q]. The last term is
/// evaluated as -K s_theta, s_theta = th_d - th_d_r. Throws SingularJacobian
/// and NumericalDivergence.
IkTorqueOutput ik_torque(const ManipulatorModel& model, const JointState& state,
                         const TaskKinematics& kin, const TaskReference& reference,
                         const ControllerConfig& cfg, const std::optional<ReferenceVelocity>& previous,
                         double dt);

struct UnwindingMetrics {
  double path_length = 0.0;  // rad, trapezoidal integral of ||omega||
  double final_sign = 1.0;   // sgn_modified(<q(T), q_d(T)>)
};

UnwindingMetrics unwinding_metrics(std::span<const double> t, std::span<const double> omega_norm,
                                   const UnitQuaternion& q_final, const UnitQuaternion& q_d_final);

}  // namespace quatslide
