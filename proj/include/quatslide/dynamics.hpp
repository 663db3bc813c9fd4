#pragma once

#include <array>

#include "quatslide/quat.hpp"
#include "quatslide/types.hpp"

namespace quatslide {

/// One revolute link in standard (distal) Denavit-Hartenberg form:
///   T_i = Rz(theta_i + theta_offset) * Tz(d) * Tx(a) * Rx(alpha).
/// Joint i rotates about z_{i-1}; frame i sits at the distal end of link i.
/// `com` and `inertia` (about the com) are expressed in frame i.
struct LinkParams {
  double a = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double theta_offset = 0.0;
  double mass = 1.0;
  Vec3 com = Vec3::Zero();
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Identity();
};

struct BasePose {
  Vec3 p = Vec3::Zero();
  UnitQuaternion q;
};

struct ManipulatorModel {
  std::array<LinkParams, kNumJoints> links{};
  Vec3 gravity{0.0, 0.0, -9.81};
  BasePose base;

  /// Throws ConfigError on non-physical links (mass <= 0, inertia not
  /// symmetric positive definite, principal moments violating the triangle
  /// inequality) or non-finite parameters.
  void validate() const;
};

struct JointState {
  JointVector theta = JointVector::Zero();
  JointVector theta_dot = JointVector::Zero();
};

/// A rigid transform as rotation + translation.
struct Transform {
  RotMat3 R = RotMat3::Identity();
  Vec3 p = Vec3::Zero();
};

/// World poses of frames 0..6 (frame 0 is the base).
using ChainFrames = std::array<Transform, kNumJoints + 1>;

ChainFrames link_frames(const ManipulatorModel& model, const JointVector& theta);

struct EndEffectorPose {
  Vec3 p = Vec3::Zero();
  UnitQuaternion q;
  RotMat3 R = RotMat3::Identity();
};

/// End-effector pose plus twist; omega is in the end-effector frame.
struct EndEffectorState {
  Vec3 p = Vec3::Zero();
  UnitQuaternion q;
  Vec3 v = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
};

/// Pose of frame 6. q is the w >= 0 representative.
EndEffectorPose forward_kinematics(const ManipulatorModel& model, const JointVector& theta);

/// [v; omega] = J theta_dot with v = dp/dt in the world frame and omega in
/// the end-effector frame.
Matrix6d geometric_jacobian(const ManipulatorModel& model, const JointVector& theta);

/// Same as geometric_jacobian but with omega in the world frame.
Matrix6d geometric_jacobian_world(const ManipulatorModel& model, const JointVector& theta);

EndEffectorState end_effector_state(const ManipulatorModel& model, const JointState& state);

/// Recursive Newton-Euler inverse dynamics: H th_dd + C th_d + g.
JointVector rnea(const ManipulatorModel& model, const JointVector& theta,
                 const JointVector& theta_dot, const JointVector& theta_ddot);

/// rnea with an explicit gravity vector (pass zero to drop gravity).
JointVector rnea(const ManipulatorModel& model, const JointVector& theta,
                 const JointVector& theta_dot, const JointVector& theta_ddot, const Vec3& gravity);

/// Joint-space inertia assembled from link Jacobians:
///   H = sum_i m_i Jv_i^T Jv_i + Jw_i^T I_i Jw_i.
Matrix6d mass_matrix(const ManipulatorModel& model, const JointVector& theta);

/// Central-difference step used for dH/dtheta.
inline constexpr double kChristoffelStep = 1e-6;

/// Coriolis matrix from Christoffel symbols of H,
///   C_kj = sum_i 1/2 (dH_kj/dth_i + dH_ki/dth_j - dH_ij/dth_k) th_d_i,
/// so H_dot - 2C is skew-symmetric.
Matrix6d coriolis_matrix(const ManipulatorModel& model, const JointVector& theta,
                         const JointVector& theta_dot);

JointVector gravity_vector(const ManipulatorModel& model, const JointVector& theta);

/// th_dd = H^{-1} (tau - C th_d - g), with the bias taken from rnea.
JointVector forward_dynamics(const ManipulatorModel& model, const JointVector& theta,
                             const JointVector& theta_dot, const JointVector& tau);

double kinetic_energy(const ManipulatorModel& model, const JointState& state);
/// -sum_i m_i gravity . c_i, zero at the world origin.
double potential_energy(const ManipulatorModel& model, const JointVector& theta);

/// |det J|.
double manipulability(const Matrix6d& J);
/// sigma_max / sigma_min; +infinity for (numerically) rank-deficient J.
double condition_number(const Matrix6d& J);

}  // namespace quatslide
