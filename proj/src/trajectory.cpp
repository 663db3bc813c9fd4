#include "quatslide/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "quatslide/errors.hpp"

namespace quatslide {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_time(double t, double duration) {
  if (!(t >= 0.0 && t <= duration)) {
    std::ostringstream os;
    os << "trajectory time " << t << " outside [0, " << duration << "]";
    throw OutOfRange(os.str());
  }
}

// Rotation vector of the shortest rotation represented by q.
Vec3 rotation_vector(const UnitQuaternion& q) {
  const Vec3 v = sgn_modified(q.w()) * q.vec();
  const double s = v.norm();
  if (s < 1e-300) return Vec3::Zero();
  const double angle = 2.0 * std::atan2(s, std::abs(q.w()));
  return (angle / s) * v;
}

Vector6d pose_error(const ManipulatorModel& model, const JointVector& theta, const Vec3& p,
                    const UnitQuaternion& q) {
  const EndEffectorPose pose = forward_kinematics(model, theta);
  Vector6d e;
  e << p - pose.p, rotation_vector(conjugate(pose.q) * q);
  return e;
}

}  // namespace

Vec3 TaskReference::omega_d_local() const {
  return frame == Frame::Local ? omega_d : Vec3(to_rotation_matrix(q_d).transpose() * omega_d);
}

Vec3 TaskReference::omega_d_global() const {
  return frame == Frame::Global ? omega_d : Vec3(to_rotation_matrix(q_d) * omega_d);
}

void TrajectorySpec::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("trajectory: duration must be > 0");
  if (!(frequency.minCoeff() >= 0.0) || !frequency.allFinite())
    throw ConfigError("trajectory: frequencies must be >= 0");
  if (!amplitude.allFinite() || !p0.allFinite()) throw ConfigError("trajectory: non-finite position data");
  if (!(axis.norm() > 0.0) || !axis.allFinite()) throw ConfigError("trajectory: rotation axis must be nonzero");
  if (!std::isfinite(rate) || !std::isfinite(slew_angle)) throw ConfigError("trajectory: non-finite rotation data");
  if (variant == TrajectoryVariant::GeodesicSlew && !(slew_duration > 0.0))
    throw ConfigError("trajectory: slew_duration must be > 0");
}

TaskReference sample(const TrajectorySpec& spec, double t) {
  check_time(t, spec.duration);
  TaskReference ref;
  ref.frame = spec.frame;
  ref.p_d = spec.p0;
  ref.q_d = spec.q0;
  if (spec.variant == TrajectoryVariant::SetPoint) return ref;

  for (int i = 0; i < 3; ++i) {
    const double w = kTwoPi * spec.frequency[i];
    const double A = spec.amplitude[i];
    ref.p_d[i] += A * std::sin(w * t);
    ref.v_d[i] = A * w * std::cos(w * t);
    ref.a_d[i] = -A * w * w * std::sin(w * t);
  }

  double angle = 0.0;
  double rate = 0.0;
  if (spec.variant == TrajectoryVariant::SinusoidRotation) {
    rate = spec.rate;
    angle = rate * t;
  } else {
    const double slew_rate = spec.slew_angle / spec.slew_duration;
    if (t < spec.slew_duration) {
      rate = slew_rate;
      angle = slew_rate * t;
    } else {
      angle = spec.slew_angle;
    }
  }
  const Vec3 u = spec.axis.normalized();
  ref.q_d = spec.q0 * from_axis_angle(u, angle);
  // The axis is invariant under the rotation it generates, so the body and
  // inertial angular velocities are both constant.
  const Vec3 omega_local = rate * u;
  ref.omega_d = spec.frame == Frame::Local ? omega_local : Vec3(to_rotation_matrix(spec.q0) * omega_local);
  return ref;
}

void JointTrajectorySpec::validate() const {
  if (!(duration > 0.0)) throw ConfigError("joint trajectory: duration must be > 0");
  if (!(frequency.minCoeff() >= 0.0) || !frequency.allFinite())
    throw ConfigError("joint trajectory: frequencies must be >= 0");
  if (!theta0.allFinite() || !amplitude.allFinite()) throw ConfigError("joint trajectory: non-finite data");
}

JointReference sample(const JointTrajectorySpec& spec, double t) {
  check_time(t, spec.duration);
  JointReference ref;
  for (int i = 0; i < kNumJoints; ++i) {
    const double w = kTwoPi * spec.frequency[i];
    const double A = spec.amplitude[i];
    ref.theta_d[i] = spec.theta0[i] + A * std::sin(w * t);
    ref.theta_dot_d[i] = A * w * std::cos(w * t);
    ref.theta_ddot_d[i] = -A * w * w * std::sin(w * t);
  }
  return ref;
}

IkResult solve_ik(const ManipulatorModel& model, const Vec3& p, const UnitQuaternion& q,
                  const JointVector& seed, const IkOptions& options) {
  IkResult result;
  result.theta = seed;
  Vector6d e = pose_error(model, result.theta, p, q);
  result.residual = e.norm();
  const double mu2 = options.damping * options.damping;
  while (result.residual > options.tolerance && result.iterations < options.max_iterations) {
    const Matrix6d J = geometric_jacobian(model, result.theta);
    const Matrix6d JJt = J * J.transpose() + mu2 * Matrix6d::Identity();
    const JointVector step = J.transpose() * JJt.ldlt().solve(e);
    result.theta += step;
    e = pose_error(model, result.theta, p, q);
    result.residual = e.norm();
    ++result.iterations;
    if (!std::isfinite(result.residual)) break;
  }
  return result;
}

ReachabilityReport reachability_check(const ManipulatorModel& model, const TrajectorySpec& spec,
                                      int n_samples, const JointVector& seed, double cond_abort) {
  if (n_samples < 1) throw DomainError("reachability_check: n_samples must be >= 1");
  ReachabilityReport report;
  report.min_manipulability = std::numeric_limits<double>::infinity();
  JointVector theta = seed;
  for (int k = 0; k < n_samples; ++k) {
    const double t = n_samples == 1 ? 0.0 : spec.duration * k / (n_samples - 1);
    const TaskReference ref = sample(spec, t);
    const IkResult ik = solve_ik(model, ref.p_d, ref.q_d, theta);
    if (!(ik.residual <= kReachabilityResidual)) {
      std::ostringstream os;
      os << "trajectory unreachable at t = " << t << " (IK residual " << ik.residual << ")";
      throw UnreachableTrajectory(os.str());
    }
    theta = ik.theta;
    const Matrix6d J = geometric_jacobian(model, theta);
    ReachabilitySample s{t, theta, manipulability(J), condition_number(J)};
    report.min_manipulability = std::min(report.min_manipulability, s.manipulability);
    report.max_condition = std::max(report.max_condition, s.condition);
    if (s.condition > cond_abort) ++report.condition_violations;
    report.samples.push_back(s);
  }
  return report;
}

}  // namespace quatslide
