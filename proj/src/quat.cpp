#include "quatslide/quat.hpp"

#include <cmath>
#include <sstream>

#include "quatslide/errors.hpp"

namespace quatslide {

double Quat::norm() const { return std::sqrt(squared_norm()); }

Quat hamilton_product(const Quat& q1, const Quat& q2) {
  const Vec3 v1 = q1.vec();
  const Vec3 v2 = q2.vec();
  const double w = q1.w * q2.w - v1.dot(v2);
  const Vec3 v = q1.w * v2 + q2.w * v1 + v1.cross(v2);
  return {w, v};
}

Quat conjugate(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

UnitQuaternion UnitQuaternion::from_unit(const Quat& q) {
  const double n = q.norm();
  if (!(std::abs(n - 1.0) <= kUnitTolerance)) {
    std::ostringstream os;
    os << "quaternion is not unit (norm " << n << ")";
    throw DegenerateQuaternion(os.str());
  }
  return UnitQuaternion(q);
}

UnitQuaternion normalize(const Quat& q) {
  const double n = q.norm();
  if (!(n > kNormEpsilon)) {
    std::ostringstream os;
    os << "cannot normalize quaternion with norm " << n;
    throw DegenerateQuaternion(os.str());
  }
  return UnitQuaternion(q * (1.0 / n));
}

UnitQuaternion conjugate(const UnitQuaternion& q) { return UnitQuaternion(conjugate(q.q_)); }

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return UnitQuaternion(hamilton_product(a.q_, b.q_));
}

RotMat3 to_rotation_matrix(const UnitQuaternion& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  RotMat3 R;
  R << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return R;
}

UnitQuaternion from_rotation_matrix(const RotMat3& R) {
  // Shepperd: branch on the largest of the four squared components.
  const double tr = R.trace();
  Quat q;
  if (tr >= R(0, 0) && tr >= R(1, 1) && tr >= R(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    q = {0.25 * s, (R(2, 1) - R(1, 2)) / s, (R(0, 2) - R(2, 0)) / s, (R(1, 0) - R(0, 1)) / s};
  } else if (R(0, 0) >= R(1, 1) && R(0, 0) >= R(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2));
    q = {(R(2, 1) - R(1, 2)) / s, 0.25 * s, (R(0, 1) + R(1, 0)) / s, (R(0, 2) + R(2, 0)) / s};
  } else if (R(1, 1) >= R(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2));
    q = {(R(0, 2) - R(2, 0)) / s, (R(0, 1) + R(1, 0)) / s, 0.25 * s, (R(1, 2) + R(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1));
    q = {(R(1, 0) - R(0, 1)) / s, (R(0, 2) + R(2, 0)) / s, (R(1, 2) + R(2, 1)) / s, 0.25 * s};
  }
  if (q.w < 0.0) q = -q;
  return normalize(q);
}

UnitQuaternion from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateAxis("rotation axis must be nonzero and finite");
  const Vec3 u = axis / n;
  return normalize(Quat(std::cos(0.5 * angle), std::sin(0.5 * angle) * u));
}

UnitQuaternion align_with(const UnitQuaternion& q, const UnitQuaternion& reference) {
  return q.dot(reference) < 0.0 ? -q : q;
}

Quat qdot_local(const UnitQuaternion& q, const Vec3& omega) {
  return 0.5 * hamilton_product(q, Quat(0.0, omega));
}

Quat qdot_global(const UnitQuaternion& q, const Vec3& omega_global) {
  return 0.5 * hamilton_product(Quat(0.0, omega_global), q);
}

}  // namespace quatslide
