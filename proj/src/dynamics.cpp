#include "quatslide/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "quatslide/errors.hpp"

namespace quatslide {

namespace {

Transform dh_transform(const LinkParams& link, double theta) {
  const double th = theta + link.theta_offset;
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(link.alpha), sa = std::sin(link.alpha);
  Transform T;
  T.R << ct, -st * ca, st * sa,
         st, ct * ca, -ct * sa,
         0.0, sa, ca;
  T.p << link.a * ct, link.a * st, link.d;
  return T;
}

Transform compose(const Transform& a, const Transform& b) { return {a.R * b.R, a.p + a.R * b.p}; }

Vec3 com_world(const ManipulatorModel& model, const ChainFrames& frames, int link) {
  const Transform& T = frames[link + 1];
  return T.p + T.R * model.links[link].com;
}

void require_finite(double v, const char* what, int link) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "link " << link + 1 << ": " << what << " is not finite";
    throw ConfigError(os.str());
  }
}

}  // namespace

void ManipulatorModel::validate() const {
  for (int i = 0; i < kNumJoints; ++i) {
    const LinkParams& l = links[i];
    require_finite(l.a, "a", i);
    require_finite(l.alpha, "alpha", i);
    require_finite(l.d, "d", i);
    require_finite(l.theta_offset, "theta_offset", i);
    require_finite(l.mass, "mass", i);
    std::ostringstream os;
    os << "link " << i + 1 << ": ";
    if (!(l.mass > 0.0)) throw ConfigError(os.str() + "mass must be > 0");
    if (!l.com.allFinite() || !l.inertia.allFinite()) throw ConfigError(os.str() + "com/inertia not finite");
    if ((l.inertia - l.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + l.inertia.cwiseAbs().maxCoeff()))
      throw ConfigError(os.str() + "inertia must be symmetric");
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(l.inertia);
    const Vec3 m = eig.eigenvalues();
    if (!(m.minCoeff() > 0.0)) throw ConfigError(os.str() + "inertia must be positive definite");
    const double tol = 1e-12 * m.sum();
    if (m[0] + m[1] < m[2] - tol || m[0] + m[2] < m[1] - tol || m[1] + m[2] < m[0] - tol)
      throw ConfigError(os.str() + "principal moments violate the triangle inequality");
  }
  if (!gravity.allFinite() || !base.p.allFinite()) throw ConfigError("gravity/base pose not finite");
}

ChainFrames link_frames(const ManipulatorModel& model, const JointVector& theta) {
  ChainFrames frames;
  frames[0] = {to_rotation_matrix(model.base.q), model.base.p};
  for (int i = 0; i < kNumJoints; ++i) frames[i + 1] = compose(frames[i], dh_transform(model.links[i], theta[i]));
  return frames;
}

EndEffectorPose forward_kinematics(const ManipulatorModel& model, const JointVector& theta) {
  const ChainFrames frames = link_frames(model, theta);
  const Transform& ee = frames[kNumJoints];
  return {ee.p, from_rotation_matrix(ee.R), ee.R};
}

Matrix6d geometric_jacobian_world(const ManipulatorModel& model, const JointVector& theta) {
  const ChainFrames frames = link_frames(model, theta);
  const Vec3& p_ee = frames[kNumJoints].p;
  Matrix6d J;
  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3 z = frames[i].R.col(2);
    J.block<3, 1>(0, i) = z.cross(p_ee - frames[i].p);
    J.block<3, 1>(3, i) = z;
  }
  return J;
}

Matrix6d geometric_jacobian(const ManipulatorModel& model, const JointVector& theta) {
  const ChainFrames frames = link_frames(model, theta);
  const Vec3& p_ee = frames[kNumJoints].p;
  const RotMat3 Rt = frames[kNumJoints].R.transpose();
  Matrix6d J;
  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3 z = frames[i].R.col(2);
    J.block<3, 1>(0, i) = z.cross(p_ee - frames[i].p);
    J.block<3, 1>(3, i) = Rt * z;
  }
  return J;
}

EndEffectorState end_effector_state(const ManipulatorModel& model, const JointState& state) {
  const EndEffectorPose pose = forward_kinematics(model, state.theta);
  const Vector6d twist = geometric_jacobian(model, state.theta) * state.theta_dot;
  return {pose.p, pose.q, twist.head<3>(), twist.tail<3>()};
}

JointVector rnea(const ManipulatorModel& model, const JointVector& theta, const JointVector& theta_dot,
                 const JointVector& theta_ddot) {
  return rnea(model, theta, theta_dot, theta_ddot, model.gravity);
}

JointVector rnea(const ManipulatorModel& model, const JointVector& theta, const JointVector& theta_dot,
                 const JointVector& theta_ddot, const Vec3& gravity) {
  const ChainFrames frames = link_frames(model, theta);

  // Forward pass in world coordinates. The base accelerates at -gravity so
  // gravity loads come out of the inertial forces.
  std::array<Vec3, kNumJoints> force, moment;
  Vec3 omega = Vec3::Zero();
  Vec3 omega_dot = Vec3::Zero();
  Vec3 accel = -gravity;  // linear acceleration of the previous frame origin
  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3 z = frames[i].R.col(2);
    const Vec3 r = frames[i + 1].p - frames[i].p;
    omega_dot = omega_dot + theta_ddot[i] * z + theta_dot[i] * omega.cross(z);
    omega = omega + theta_dot[i] * z;
    accel = accel + omega_dot.cross(r) + omega.cross(omega.cross(r));

    const Vec3 rc = frames[i + 1].R * model.links[i].com;
    const Vec3 accel_com = accel + omega_dot.cross(rc) + omega.cross(omega.cross(rc));
    const Eigen::Matrix3d I = frames[i + 1].R * model.links[i].inertia * frames[i + 1].R.transpose();
    force[i] = model.links[i].mass * accel_com;
    moment[i] = I * omega_dot + omega.cross(I * omega);
  }

  // Backward pass: f, n are the wrench exerted on link i by link i-1,
  // moments taken about the joint origin o_{i-1}.
  JointVector tau;
  Vec3 f_next = Vec3::Zero();
  Vec3 n_next = Vec3::Zero();  // about o_i
  for (int i = kNumJoints - 1; i >= 0; --i) {
    const Vec3& o_prev = frames[i].p;
    const Vec3& o_i = frames[i + 1].p;
    const Vec3 c = o_i + frames[i + 1].R * model.links[i].com;
    const Vec3 f = f_next + force[i];
    const Vec3 n = n_next + moment[i] + (c - o_prev).cross(force[i]) + (o_i - o_prev).cross(f_next);
    tau[i] = n.dot(frames[i].R.col(2));
    f_next = f;
    n_next = n;
  }
  return tau;
}

Matrix6d mass_matrix(const ManipulatorModel& model, const JointVector& theta) {
  const ChainFrames frames = link_frames(model, theta);
  Matrix6d H = Matrix6d::Zero();
  for (int i = 0; i < kNumJoints; ++i) {
    const Vec3 c = com_world(model, frames, i);
    Eigen::Matrix<double, 3, kNumJoints> Jv = Eigen::Matrix<double, 3, kNumJoints>::Zero();
    Eigen::Matrix<double, 3, kNumJoints> Jw = Eigen::Matrix<double, 3, kNumJoints>::Zero();
    for (int j = 0; j <= i; ++j) {
      const Vec3 z = frames[j].R.col(2);
      Jv.col(j) = z.cross(c - frames[j].p);
      Jw.col(j) = z;
    }
    const Eigen::Matrix3d I = frames[i + 1].R * model.links[i].inertia * frames[i + 1].R.transpose();
    H.noalias() += model.links[i].mass * Jv.transpose() * Jv;
    H.noalias() += Jw.transpose() * I * Jw;
  }
  return 0.5 * (H + H.transpose());
}

Matrix6d coriolis_matrix(const ManipulatorModel& model, const JointVector& theta,
                         const JointVector& theta_dot) {
  const double h = kChristoffelStep;
  std::array<Matrix6d, kNumJoints> dH;
  for (int i = 0; i < kNumJoints; ++i) {
    JointVector plus = theta, minus = theta;
    plus[i] += h;
    minus[i] -= h;
    dH[i] = (mass_matrix(model, plus) - mass_matrix(model, minus)) / (2.0 * h);
  }
  Matrix6d C = Matrix6d::Zero();
  for (int k = 0; k < kNumJoints; ++k) {
    for (int j = 0; j < kNumJoints; ++j) {
      double c = 0.0;
      for (int i = 0; i < kNumJoints; ++i) c += (dH[i](k, j) + dH[j](k, i) - dH[k](i, j)) * theta_dot[i];
      C(k, j) = 0.5 * c;
    }
  }
  return C;
}

JointVector gravity_vector(const ManipulatorModel& model, const JointVector& theta) {
  return rnea(model, theta, JointVector::Zero(), JointVector::Zero());
}

JointVector forward_dynamics(const ManipulatorModel& model, const JointVector& theta,
                             const JointVector& theta_dot, const JointVector& tau) {
  const JointVector bias = rnea(model, theta, theta_dot, JointVector::Zero());
  return mass_matrix(model, theta).llt().solve(tau - bias);
}

double kinetic_energy(const ManipulatorModel& model, const JointState& state) {
  return 0.5 * state.theta_dot.dot(mass_matrix(model, state.theta) * state.theta_dot);
}

double potential_energy(const ManipulatorModel& model, const JointVector& theta) {
  const ChainFrames frames = link_frames(model, theta);
  double pe = 0.0;
  for (int i = 0; i < kNumJoints; ++i) pe -= model.links[i].mass * model.gravity.dot(com_world(model, frames, i));
  return pe;
}

double manipulability(const Matrix6d& J) { return std::abs(J.determinant()); }

double condition_number(const Matrix6d& J) {
  const Eigen::JacobiSVD<Matrix6d> svd(J);
  const Vector6d s = svd.singularValues();
  const double s_max = s[0];
  const double s_min = s[kNumJoints - 1];
  if (!(s_max > 0.0)) return std::numeric_limits<double>::infinity();
  if (s_min <= s_max * kNumJoints * std::numeric_limits<double>::epsilon())
    return std::numeric_limits<double>::infinity();
  return s_max / s_min;
}

}  // namespace quatslide
