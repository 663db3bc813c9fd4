#pragma once

#include <vector>

#include "quatslide/dynamics.hpp"
#include "quatslide/quat.hpp"
#include "quatslide/types.hpp"

namespace quatslide {

/// Desired end-effector motion at one instant. omega_d and alpha_d are in
/// the frame named by `frame` (desired body frame for Local).
struct TaskReference {
  Vec3 p_d = Vec3::Zero();
  Vec3 v_d = Vec3::Zero();
  Vec3 a_d = Vec3::Zero();
  UnitQuaternion q_d;
  Vec3 omega_d = Vec3::Zero();
  Vec3 alpha_d = Vec3::Zero();
  Frame frame = Frame::Local;

  Vec3 omega_d_local() const;
  Vec3 omega_d_global() const;
};

enum class TrajectoryVariant {
  SetPoint,           // constant pose
  SinusoidRotation,   // per-axis sinusoidal position, constant-rate rotation about a fixed axis
  GeodesicSlew,       // sinusoidal position, rotation by a fixed angle at constant rate, then hold
};

/// Desired end-effector trajectory:
///   p_d(t) = p0 + amplitude .* sin(2 pi frequency t)
///   q_d(t) = q0 (x) from_axis_angle(axis, angle(t))
/// with angle(t) = rate t (SinusoidRotation) or rate min(t, slew_duration)
/// where rate = slew_angle / slew_duration (GeodesicSlew). The axis is
/// fixed in the desired body frame, so the local omega_d is axis * rate.
struct TrajectorySpec {
  TrajectoryVariant variant = TrajectoryVariant::SetPoint;
  Vec3 p0 = Vec3::Zero();
  UnitQuaternion q0;
  Vec3 amplitude = Vec3::Zero();  // m
  Vec3 frequency = Vec3::Zero();  // Hz
  Vec3 axis{0.0, 0.0, 1.0};
  double rate = 0.0;           // rad/s, SinusoidRotation
  double slew_angle = 0.0;     // rad, GeodesicSlew
  double slew_duration = 1.0;  // s, GeodesicSlew
  double duration = 10.0;      // s
  Frame frame = Frame::Local;

  /// Throws ConfigError on negative frequencies, non-positive durations, or a
  /// zero rotation axis.
  void validate() const;
};

/// Throws OutOfRange unless 0 <= t <= duration.
TaskReference sample(const TrajectorySpec& spec, double t);

/// Joint-space reference for the Slotine-Li joint controller.
struct JointReference {
  JointVector theta_d = JointVector::Zero();
  JointVector theta_dot_d = JointVector::Zero();
  JointVector theta_ddot_d = JointVector::Zero();
};

/// theta_d(t) = theta0 + amplitude .* sin(2 pi frequency t).
struct JointTrajectorySpec {
  JointVector theta0 = JointVector::Zero();
  JointVector amplitude = JointVector::Zero();
  JointVector frequency = JointVector::Zero();
  double duration = 10.0;

  void validate() const;
};

JointReference sample(const JointTrajectorySpec& spec, double t);

struct IkOptions {
  double damping = 1e-3;
  double tolerance = 1e-10;
  int max_iterations = 200;
};

struct IkResult {
  JointVector theta = JointVector::Zero();
  double residual = 0.0;  // ||[p error; rotation-vector error]||
  int iterations = 0;
};

/// Damped least-squares IK from `seed`. Does not throw when it fails to
/// converge; check `residual`.
IkResult solve_ik(const ManipulatorModel& model, const Vec3& p, const UnitQuaternion& q,
                  const JointVector& seed, const IkOptions& options = {});

inline constexpr double kReachabilityResidual = 1e-6;

struct ReachabilitySample {
  double t = 0.0;
  JointVector theta = JointVector::Zero();
  double manipulability = 0.0;
  double condition = 0.0;
};

struct ReachabilityReport {
  std::vector<ReachabilitySample> samples;
  double min_manipulability = 0.0;
  double max_condition = 0.0;
  int condition_violations = 0;  // samples with condition > cond_abort
  bool ok() const { return condition_violations == 0; }
};

/// Tracks the trajectory with IK at n_samples evenly spaced times (seeded
/// from the previous solution, the first from `seed`) and reports
/// conditioning along the joint path. Throws UnreachableTrajectory when an
/// IK residual exceeds kReachabilityResidual.
ReachabilityReport reachability_check(const ManipulatorModel& model, const TrajectorySpec& spec,
                                      int n_samples, const JointVector& seed, double cond_abort);

}  // namespace quatslide
