#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "quatslide/errors.hpp"
#include "quatslide/integrator.hpp"
#include "quatslide/quat.hpp"
#include "test_support.hpp"

using namespace quatslide;
using quatslide::testing::quat_distance;
using quatslide::testing::random_unit_quaternion;
using quatslide::testing::random_vec3;
using quatslide::testing::rotation_distance;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("hamilton product: basis and identity") {
  const Quat one{1, 0, 0, 0}, i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
  CHECK(quat_distance(hamilton_product(one, one), one) == 0.0);
  CHECK(quat_distance(hamilton_product(i, j), k) == 0.0);
  CHECK(quat_distance(hamilton_product(j, i), -k) == 0.0);
  CHECK(quat_distance(hamilton_product(i, i), -one) == 0.0);
  const Quat a{1, 2, 3, 4};
  CHECK(quat_distance(hamilton_product(a, one), a) == 0.0);
  CHECK(quat_distance(hamilton_product(one, a), a) == 0.0);
}

TEST_CASE("hamilton product preserves the unit norm") {
  for (int n = 0; n < 1000; ++n) {
    const UnitQuaternion a = random_unit_quaternion(), b = random_unit_quaternion();
    CHECK(std::abs(hamilton_product(a, b).norm() - 1.0) <= 1e-12);
    CHECK(std::abs(hamilton_product(a, conjugate(a.quat())).w - 1.0) <= 1e-12);
  }
}

TEST_CASE("conjugate reverses products") {
  CHECK(quat_distance(conjugate(Quat{1, 2, 3, 4}), Quat{1, -2, -3, -4}) == 0.0);
  for (int n = 0; n < 200; ++n) {
    const UnitQuaternion a = random_unit_quaternion(), b = random_unit_quaternion();
    const Quat lhs = conjugate(hamilton_product(a, b));
    const Quat rhs = hamilton_product(conjugate(b.quat()), conjugate(a.quat()));
    CHECK(quat_distance(lhs, rhs) <= 1e-14);
  }
}

TEST_CASE("normalize") {
  const UnitQuaternion q = normalize(Quat{0, 3, 0, 4});
  CHECK(q.x() == doctest::Approx(0.6));
  CHECK(q.z() == doctest::Approx(0.8));
  CHECK_THROWS_AS(normalize(Quat{0, 0, 0, 0}), DegenerateQuaternion);
  CHECK_THROWS_AS(normalize(Quat{1e-9, 0, 0, 0}), DegenerateQuaternion);
  CHECK_NOTHROW(normalize(Quat{1e-7, 0, 0, 0}));
  CHECK_THROWS_AS(normalize(Quat{std::nan(""), 0, 0, 1}), DegenerateQuaternion);
}

TEST_CASE("from_unit enforces the tolerance") {
  CHECK_NOTHROW(UnitQuaternion::from_unit(Quat{1 + 1e-10, 0, 0, 0}));
  CHECK_THROWS_AS(UnitQuaternion::from_unit(Quat{1.001, 0, 0, 0}), DegenerateQuaternion);
}

TEST_CASE("rotation matrix examples") {
  CHECK((to_rotation_matrix(UnitQuaternion{}) - RotMat3::Identity()).norm() == 0.0);
  const UnitQuaternion qz = from_axis_angle(Vec3::UnitZ(), kPi / 2);
  CHECK(qz.w() == doctest::Approx(std::sqrt(0.5)));
  CHECK(qz.z() == doctest::Approx(std::sqrt(0.5)));
  RotMat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((to_rotation_matrix(qz) - expected).norm() <= 1e-15);
  const UnitQuaternion qx = from_axis_angle(Vec3::UnitX(), kPi);
  CHECK((to_rotation_matrix(qx) - Eigen::Vector3d(1, -1, -1).asDiagonal().toDenseMatrix()).norm() <= 1e-15);
}

TEST_CASE("rotation matrix properties") {
  for (int n = 0; n < 1000; ++n) {
    const UnitQuaternion a = random_unit_quaternion(), b = random_unit_quaternion();
    const RotMat3 Ra = to_rotation_matrix(a);
    CHECK((Ra.transpose() * Ra - RotMat3::Identity()).norm() <= 1e-14);
    CHECK(Ra.determinant() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((to_rotation_matrix(-a) - Ra).norm() == 0.0);
    CHECK((to_rotation_matrix(a * b) - Ra * to_rotation_matrix(b)).norm() <= 1e-14);
    const Vec3 v = random_vec3();
    const Quat rotated = hamilton_product(hamilton_product(a, Quat{0, v.x(), v.y(), v.z()}), conjugate(a.quat()));
    CHECK((rotated.vec() - Ra * v).norm() <= 1e-14);
  }
}

TEST_CASE("from_rotation_matrix round trip up to sign") {
  for (int n = 0; n < 1000; ++n) {
    const UnitQuaternion q = random_unit_quaternion();
    const UnitQuaternion back = from_rotation_matrix(to_rotation_matrix(q));
    CHECK(back.w() >= 0.0);
    CHECK(rotation_distance(back, q) <= 1e-13);
  }
  const UnitQuaternion half_turn = from_rotation_matrix(Eigen::Vector3d(-1, -1, 1).asDiagonal().toDenseMatrix());
  CHECK(rotation_distance(half_turn, Quat{0, 0, 0, 1}) <= 1e-15);
}

TEST_CASE("from_axis_angle") {
  const UnitQuaternion q = from_axis_angle(Vec3(0, 0, 2), kPi);
  CHECK(rotation_distance(q, Quat{0, 0, 0, 1}) <= 1e-15);
  CHECK(rotation_distance(from_axis_angle(Vec3::UnitY(), 0.0), Quat{1, 0, 0, 0}) == 0.0);
  CHECK_THROWS_AS(from_axis_angle(Vec3::Zero(), 1.0), DegenerateAxis);
  CHECK_THROWS_AS(from_axis_angle(Vec3(std::nan(""), 0, 0), 1.0), DegenerateAxis);
}

TEST_CASE("align_with picks the nearer sign") {
  const UnitQuaternion q = random_unit_quaternion();
  CHECK(quat_distance(align_with(-q, q), q) == 0.0);
  CHECK(quat_distance(align_with(q, q), q) == 0.0);
}

TEST_CASE("kinematics examples") {
  const Quat d = qdot_local(UnitQuaternion{}, Vec3(0, 0, 1));
  CHECK(quat_distance(d, Quat{0, 0, 0, 0.5}) == 0.0);
  const UnitQuaternion qz = from_axis_angle(Vec3::UnitZ(), kPi / 2);
  const Quat dg = qdot_global(qz, Vec3(0, 0, 1));
  const Quat dl = qdot_local(qz, Vec3(0, 0, 1));
  CHECK(quat_distance(dg, dl) <= 1e-15);
}

TEST_CASE("kinematics: tangency and frame equivalence") {
  for (int n = 0; n < 1000; ++n) {
    const UnitQuaternion q = random_unit_quaternion();
    const Vec3 w = random_vec3(3.0);
    const Quat dl = qdot_local(q, w);
    CHECK(std::abs(q.quat().dot(dl)) <= 1e-14);
    const Quat dg = qdot_global(q, to_rotation_matrix(q) * w);
    CHECK(quat_distance(dl, dg) <= 1e-12);
  }
}

TEST_CASE("integrating local kinematics matches the axis-angle closed form") {
  for (int n = 0; n < 20; ++n) {
    const UnitQuaternion q0 = random_unit_quaternion();
    const Vec3 w = random_vec3(2.0);
    const double dt = 1e-3, T = 2.0;
    UnitQuaternion q = q0;
    auto f = [&](double, const Eigen::Vector4d& c) -> Eigen::Vector4d {
      return qdot_local(UnitQuaternion::from_unit(normalize(Quat::from_coeffs(c))), w).coeffs();
    };
    for (int k = 0; k < static_cast<int>(std::lround(T / dt)); ++k) {
      q = normalize(Quat::from_coeffs(rk4_step(f, 0.0, q.coeffs(), dt)));
    }
    const UnitQuaternion exact = q0 * from_axis_angle(w, w.norm() * T);
    CHECK(quat_distance(q, exact) <= 1e-6);
  }
}

TEST_CASE("modified sign") {
  CHECK(sgn_modified(0.0) == 1.0);
  CHECK(sgn_modified(-0.0) == 1.0);
  CHECK(sgn_modified(2.5) == 1.0);
  CHECK(sgn_modified(-1e-300) == -1.0);
}
