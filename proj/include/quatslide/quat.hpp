#pragma once

#include <Eigen/Dense>

#include "quatslide/types.hpp"

namespace quatslide {

/// Threshold below which a quaternion cannot be normalized.
inline constexpr double kNormEpsilon = 1e-8;
/// Allowed deviation from unit norm for a UnitQuaternion.
inline constexpr double kUnitTolerance = 1e-9;

/// Raw quaternion (w, x, y, z), scalar first. No norm constraint, so it
/// also carries time derivatives.
struct Quat {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quat() = default;
  constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}
  Quat(double w_, const Vec3& v) : w(w_), x(v.x()), y(v.y()), z(v.z()) {}

  Vec3 vec() const { return {x, y, z}; }
  Eigen::Vector4d coeffs() const { return {w, x, y, z}; }
  static Quat from_coeffs(const Eigen::Vector4d& c) { return {c[0], c[1], c[2], c[3]}; }

  double squared_norm() const { return w * w + x * x + y * y + z * z; }
  double norm() const;
  double dot(const Quat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

  Quat operator-() const { return {-w, -x, -y, -z}; }
  Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  friend Quat operator*(double s, const Quat& q) { return q * s; }
};

Quat hamilton_product(const Quat& q1, const Quat& q2);
Quat conjugate(const Quat& q);

class UnitQuaternion;
UnitQuaternion normalize(const Quat& q);

/// Quaternion on S3. q and -q encode the same rotation; consumers must not
/// depend on which one they receive.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  static UnitQuaternion identity() { return {}; }
  /// Wraps a quaternion that is already unit within kUnitTolerance.
  /// Throws DegenerateQuaternion otherwise.
  static UnitQuaternion from_unit(const Quat& q);

  const Quat& quat() const { return q_; }
  operator const Quat&() const { return q_; }  // NOLINT(google-explicit-constructor)

  double w() const { return q_.w; }
  double x() const { return q_.x; }
  double y() const { return q_.y; }
  double z() const { return q_.z; }
  Vec3 vec() const { return q_.vec(); }
  Eigen::Vector4d coeffs() const { return q_.coeffs(); }
  double dot(const UnitQuaternion& o) const { return q_.dot(o.q_); }

  UnitQuaternion operator-() const { return UnitQuaternion(-q_); }

 private:
  explicit UnitQuaternion(const Quat& q) : q_(q) {}

  Quat q_{1.0, 0.0, 0.0, 0.0};

  friend UnitQuaternion normalize(const Quat& q);
  friend UnitQuaternion conjugate(const UnitQuaternion& q);
  friend UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);
};

/// Throws DegenerateQuaternion if the norm is at most kNormEpsilon.
UnitQuaternion normalize(const Quat& q);
UnitQuaternion conjugate(const UnitQuaternion& q);
/// Hamilton product of unit quaternions (unit up to rounding).
UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);

RotMat3 to_rotation_matrix(const UnitQuaternion& q);
/// Inverse of to_rotation_matrix; returns the representative with w >= 0.
UnitQuaternion from_rotation_matrix(const RotMat3& R);
/// Throws DegenerateAxis for a zero axis.
UnitQuaternion from_axis_angle(const Vec3& axis, double angle);

/// Returns q or -q, whichever is closer to `reference`. Used to keep a
/// quaternion path continuous when it is recomputed from a rotation matrix.
UnitQuaternion align_with(const UnitQuaternion& q, const UnitQuaternion& reference);

/// q_dot = 1/2 q (x) (0, omega), omega in the body frame.
Quat qdot_local(const UnitQuaternion& q, const Vec3& omega);
/// q_dot = 1/2 (0, omega) (x) q, omega in the inertial frame.
Quat qdot_global(const UnitQuaternion& q, const Vec3& omega_global);

/// Sign with sgn(0) = +1.
constexpr double sgn_modified(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace quatslide
