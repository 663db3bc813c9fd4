#include "quatslide/control.hpp"

#include <cmath>
#include <sstream>

#include "quatslide/errors.hpp"

namespace quatslide {

namespace {

bool uses_sgn(ControlMode mode) { return mode != ControlMode::TaskNaiveNoSgn; }

double orientation_sign(const UnitQuaternion& q_e, ControlMode mode) {
  return uses_sgn(mode) ? sgn_modified(q_e.w()) : 1.0;
}

// Solves J x = b via LU with one round of iterative refinement.
JointVector solve_checked(const Matrix6d& J, const Vector6d& b) {
  const Eigen::PartialPivLU<Matrix6d> lu(J);
  JointVector x = lu.solve(b);
  x += lu.solve(Vector6d(b - J * x));
  if (!x.allFinite()) throw NumericalDivergence("non-finite reference velocity");
  return x;
}

}  // namespace

std::string_view to_string(ControlMode mode) {
  switch (mode) {
    case ControlMode::JointSpace: return "joint_space";
    case ControlMode::TaskLocal: return "task_local";
    case ControlMode::TaskGlobal: return "task_global";
    case ControlMode::TaskNaiveNoSgn: return "task_naive_no_sgn";
  }
  return "unknown";
}

std::optional<ControlMode> parse_control_mode(std::string_view name) {
  for (ControlMode m : {ControlMode::JointSpace, ControlMode::TaskLocal, ControlMode::TaskGlobal,
                        ControlMode::TaskNaiveNoSgn}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

void ControllerConfig::validate() const {
  try {
    gains.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("controller: ") + e.what());
  }
  if (!K.allFinite()) throw ConfigError("controller: K must be finite");
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + K.cwiseAbs().maxCoeff()))
    throw ConfigError("controller: K must be symmetric");
  if (K.llt().info() != Eigen::Success) throw ConfigError("controller: K must be positive definite");
  if (!(cond_abort >= 1.0)) throw ConfigError("controller: cond_abort must be >= 1");
}

Matrix6d default_gain_matrix(const ManipulatorModel& model, double scale) {
  const Matrix6d H = mass_matrix(model, JointVector::Zero());
  return scale * Matrix6d(H.diagonal().asDiagonal());
}

JointControlOutput slotine_li_joint(const ManipulatorModel& model, const JointState& state,
                                    const JointReference& reference, const ControllerConfig& cfg) {
  const double lambda = cfg.gains.lambda;
  JointControlOutput out;
  out.ref.theta_dot_r = reference.theta_dot_d - lambda * (state.theta - reference.theta_d);
  out.ref.theta_ddot_r = reference.theta_ddot_d - lambda * (state.theta_dot - reference.theta_dot_d);
  out.s_theta = state.theta_dot - out.ref.theta_dot_r;
  out.tau = mass_matrix(model, state.theta) * out.ref.theta_ddot_r +
            coriolis_matrix(model, state.theta, state.theta_dot) * out.ref.theta_dot_r +
            gravity_vector(model, state.theta) - cfg.K * out.s_theta;
  if (!out.tau.allFinite()) throw NumericalDivergence("non-finite joint torque");
  return out;
}

TaskKinematics task_kinematics(const ManipulatorModel& model, const JointState& state,
                               const std::optional<UnitQuaternion>& previous_q) {
  TaskKinematics kin;
  const EndEffectorPose pose = forward_kinematics(model, state.theta);
  kin.p = pose.p;
  kin.q = previous_q ? align_with(pose.q, *previous_q) : pose.q;
  kin.R = pose.R;
  kin.J = geometric_jacobian(model, state.theta);
  const Vector6d twist = kin.J * state.theta_dot;
  kin.v = twist.head<3>();
  kin.omega = twist.tail<3>();
  kin.condition = condition_number(kin.J);
  return kin;
}

TaskErrors task_errors(const TaskKinematics& kin, const TaskReference& reference,
                       const ControllerConfig& cfg) {
  TaskErrors err;
  err.position.p_e = kin.p - reference.p_d;
  err.position.v_e = kin.v - reference.v_d;
  err.sliding.s_p = s_p(err.position.p_e, err.position.v_e, cfg.gains.sigma);

  OrientationError& o = err.orientation;
  o.q_e = error_quaternion(reference.q_d, kin.q);
  o.R_e = to_rotation_matrix(o.q_e);
  err.R_d = to_rotation_matrix(reference.q_d);
  const double lambda = cfg.gains.lambda;

  switch (cfg.mode) {
    case ControlMode::TaskGlobal:
      o.omega_e = kin.R * kin.omega - reference.omega_d_global();
      err.sliding.s_q = s_q_global(o.q_e, o.omega_e, err.R_d, lambda);
      err.sliding.frame = Frame::Global;
      break;
    case ControlMode::TaskNaiveNoSgn:
      o.omega_e = omega_error_local(kin.omega, reference.omega_d_local(), o.R_e);
      err.sliding.s_q = o.omega_e + 2.0 * lambda * o.q_e.vec();
      break;
    case ControlMode::JointSpace:
    case ControlMode::TaskLocal:
      o.omega_e = omega_error_local(kin.omega, reference.omega_d_local(), o.R_e);
      err.sliding.s_q = s_q_local(o.q_e, o.omega_e, lambda);
      break;
  }
  return err;
}

JointVector theta_dot_r_task(const TaskKinematics& kin, const TaskReference& reference,
                             const ControllerConfig& cfg) {
  if (!(kin.condition <= cfg.cond_abort)) {
    std::ostringstream os;
    os << "Jacobian condition number " << kin.condition << " exceeds " << cfg.cond_abort;
    throw SingularJacobian(os.str(), kin.condition);
  }
  const double lambda = cfg.gains.lambda;
  const double sigma = cfg.gains.sigma;
  const UnitQuaternion q_e = error_quaternion(reference.q_d, kin.q);
  const Vec3 signed_qvec = orientation_sign(q_e, cfg.mode) * q_e.vec();

  Vec3 angular;
  if (cfg.mode == ControlMode::TaskGlobal) {
    const RotMat3 R_d = to_rotation_matrix(reference.q_d);
    const Vec3 w_world = reference.omega_d_global() - 2.0 * lambda * (R_d * signed_qvec);
    angular = kin.R.transpose() * w_world;
  } else {
    const RotMat3 R_e = to_rotation_matrix(q_e);
    angular = R_e.transpose() * reference.omega_d_local() - 2.0 * lambda * signed_qvec;
  }
  Vector6d twist;
  twist << reference.v_d - sigma * (kin.p - reference.p_d), angular;
  return solve_checked(kin.J, twist);
}

JointVector theta_ddot_r_numeric(const std::optional<ReferenceVelocity>& previous,
                                 const JointVector& theta_dot_r, double dt) {
  if (!(dt > 0.0)) throw DomainError("theta_ddot_r_numeric: dt must be > 0");
  if (!previous) return JointVector::Zero();
  return (theta_dot_r - previous->theta_dot_r) / dt;
}

IkTorqueOutput ik_torque(const ManipulatorModel& model, const JointState& state,
                         const TaskKinematics& kin, const TaskReference& reference,
                         const ControllerConfig& cfg, const std::optional<ReferenceVelocity>& previous,
                         double dt) {
  if (cfg.mode == ControlMode::JointSpace) throw ConfigError("ik_torque requires a task-space mode");
  IkTorqueOutput out;
  out.errors = task_errors(kin, reference, cfg);
  out.ref.theta_dot_r = theta_dot_r_task(kin, reference, cfg);
  out.ref.theta_ddot_r = theta_ddot_r_numeric(previous, out.ref.theta_dot_r, dt);
  out.s_theta = state.theta_dot - out.ref.theta_dot_r;

  out.tau = mass_matrix(model, state.theta) * out.ref.theta_ddot_r +
            coriolis_matrix(model, state.theta, state.theta_dot) * out.ref.theta_dot_r +
            gravity_vector(model, state.theta) - cfg.K * out.s_theta;
  if (!out.tau.allFinite()) throw NumericalDivergence("non-finite task-space torque");

  Matrix6d J_frame = kin.J;
  if (cfg.mode == ControlMode::TaskGlobal) J_frame.bottomRows<3>() = kin.R * kin.J.bottomRows<3>();
  out.identity_residual = (J_frame * out.s_theta - out.errors.sliding.stacked()).cwiseAbs().maxCoeff();
  return out;
}

UnwindingMetrics unwinding_metrics(std::span<const double> t, std::span<const double> omega_norm,
                                   const UnitQuaternion& q_final, const UnitQuaternion& q_d_final) {
  UnwindingMetrics m;
  const std::size_t n = std::min(t.size(), omega_norm.size());
  for (std::size_t i = 1; i < n; ++i) m.path_length += 0.5 * (omega_norm[i] + omega_norm[i - 1]) * (t[i] - t[i - 1]);
  m.final_sign = sgn_modified(q_final.dot(q_d_final));
  return m;
}

}  // namespace quatslide
