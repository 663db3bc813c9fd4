#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "quatslide/dynamics.hpp"
#include "quatslide/errors.hpp"
#include "quatslide/integrator.hpp"
#include "quatslide/model_io.hpp"
#include "quatslide/sim.hpp"
#include "test_support.hpp"

using namespace quatslide;
using quatslide::testing::oracle_chain;
using quatslide::testing::oracle_com;
using quatslide::testing::oracle_potential;
using quatslide::testing::random_joints;
using quatslide::testing::random_unit_quaternion;
using quatslide::testing::random_vec3;
using quatslide::testing::rotation_distance;

namespace {

constexpr double kPi = std::numbers::pi;

const ManipulatorModel& arm() { return reference_model(); }

JointVector unit(int j) { return JointVector::Unit(j); }

double total_energy(const ManipulatorModel& m, const JointState& s) {
  return kinetic_energy(m, s) + potential_energy(m, s.theta);
}

}  // namespace

TEST_CASE("reference model file matches the embedded copy") {
  const ManipulatorModel from_file = load_model(QUATSLIDE_SOURCE_DIR "/models/reference_arm.json");
  CHECK(model_to_json(from_file) == model_to_json(arm()));
  CHECK_NOTHROW(arm().validate());
}

TEST_CASE("model json round trip keeps the base pose") {
  ManipulatorModel m = arm();
  m.base.p = Vec3(0.1, 0.2, 0.3);
  m.base.q = from_axis_angle(Vec3(1, 2, 3), 0.4);
  const ManipulatorModel back = model_from_json(model_to_json(m));
  CHECK((back.base.p - m.base.p).norm() == 0.0);
  CHECK(rotation_distance(back.base.q, m.base.q) <= 1e-15);
  const JointVector th = random_joints();
  CHECK((forward_kinematics(back, th).p - forward_kinematics(m, th).p).norm() <= 1e-15);
}

TEST_CASE("model validation") {
  ManipulatorModel m = arm();
  m.links[2].mass = 0.0;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = arm();
  m.links[0].inertia(0, 1) = 0.1;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = arm();
  m.links[1].inertia = Eigen::Vector3d(0.01, 0.01, 1.0).asDiagonal();
  CHECK_THROWS_AS(m.validate(), ConfigError);
  m = arm();
  m.links[3].d = std::nan("");
  CHECK_THROWS_AS(m.validate(), ConfigError);

  nlohmann::json doc = model_to_json(arm());
  doc["links"].erase(doc["links"].begin());
  CHECK_THROWS_AS(model_from_json(doc), ConfigError);
}

TEST_CASE("forward kinematics: home pose") {
  const EndEffectorPose home = forward_kinematics(arm(), JointVector::Zero());
  CHECK((home.p - Vec3(0.4, 0.0, 0.68)).norm() <= 1e-12);
  CHECK((home.R - Eigen::Vector3d(1, -1, -1).asDiagonal().toDenseMatrix()).norm() <= 1e-12);
  CHECK(rotation_distance(home.q, Quat{0, 1, 0, 0}) <= 1e-12);
  CHECK(home.q.w() >= 0.0);
}

TEST_CASE("forward kinematics agrees with a plain homogeneous chain") {
  ManipulatorModel m = arm();
  m.base.p = Vec3(0.1, -0.2, 0.3);
  m.base.q = random_unit_quaternion();
  for (int n = 0; n < 500; ++n) {
    const JointVector th = random_joints();
    const auto T = oracle_chain(m, th);
    const EndEffectorPose pose = forward_kinematics(m, th);
    CHECK((pose.p - T[6].topRightCorner<3, 1>()).norm() <= 1e-12);
    CHECK((pose.R - T[6].topLeftCorner<3, 3>()).norm() <= 1e-12);
    CHECK((to_rotation_matrix(pose.q) - pose.R).norm() <= 1e-12);
  }
}

TEST_CASE("forward kinematics: base offset and joint periodicity") {
  ManipulatorModel shifted = arm();
  shifted.base.p = Vec3(1.0, 2.0, 3.0);
  const JointVector th = random_joints();
  const EndEffectorPose a = forward_kinematics(arm(), th), b = forward_kinematics(shifted, th);
  CHECK((b.p - a.p - Vec3(1, 2, 3)).norm() <= 1e-12);
  CHECK(rotation_distance(a.q, b.q) <= 1e-12);
  const EndEffectorPose c = forward_kinematics(arm(), th + 2.0 * kPi * unit(0));
  CHECK((c.p - a.p).norm() <= 1e-12);
  CHECK(rotation_distance(c.q, a.q) <= 1e-12);
}

TEST_CASE("jacobian matches finite differences of forward kinematics") {
  const double h = 1e-6;
  for (int n = 0; n < 200; ++n) {
    const JointVector th = random_joints();
    const Matrix6d J = geometric_jacobian(arm(), th);
    const EndEffectorPose pose = forward_kinematics(arm(), th);
    for (int j = 0; j < kNumJoints; ++j) {
      const EndEffectorPose plus = forward_kinematics(arm(), th + h * unit(j));
      const EndEffectorPose minus = forward_kinematics(arm(), th - h * unit(j));
      const Vec3 v = (plus.p - minus.p) / (2 * h);
      CHECK((v - J.block<3, 1>(0, j)).cwiseAbs().maxCoeff() <= 1e-6);
      // omega_local = vee(R^T dR/dtheta_j)
      const RotMat3 W = pose.R.transpose() * (plus.R - minus.R) / (2 * h);
      const Vec3 w(W(2, 1), W(0, 2), W(1, 0));
      CHECK((w - J.block<3, 1>(3, j)).cwiseAbs().maxCoeff() <= 1e-6);
    }
    const Matrix6d Jw = geometric_jacobian_world(arm(), th);
    CHECK((Jw.topRows<3>() - J.topRows<3>()).norm() == 0.0);
    CHECK((Jw.bottomRows<3>() - pose.R * J.bottomRows<3>()).norm() <= 1e-13);
  }
  CHECK(geometric_jacobian(arm(), random_joints()) * JointVector::Zero() == Vector6d::Zero());
}

TEST_CASE("mass matrix: symmetric positive definite over random configurations") {
  for (int n = 0; n < 10000; ++n) {
    const Matrix6d H = mass_matrix(arm(), random_joints());
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix6d> es(H);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("mass matrix columns equal unit-acceleration inverse dynamics") {
  for (int n = 0; n < 200; ++n) {
    const JointVector th = random_joints();
    const Matrix6d H = mass_matrix(arm(), th);
    for (int j = 0; j < kNumJoints; ++j) {
      const JointVector col = rnea(arm(), th, JointVector::Zero(), unit(j), Vec3::Zero());
      CHECK((col - H.col(j)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("inverse dynamics decomposition") {
  for (int n = 0; n < 200; ++n) {
    const JointVector th = random_joints(), thd = random_joints(2.0), thdd = random_joints(5.0);
    const JointVector g = gravity_vector(arm(), th);
    CHECK((rnea(arm(), th, JointVector::Zero(), JointVector::Zero()) - g).norm() == 0.0);
    const Matrix6d C = coriolis_matrix(arm(), th, thd);
    const JointVector bias = rnea(arm(), th, thd, JointVector::Zero()) - g;
    CHECK((C * thd - bias).cwiseAbs().maxCoeff() <= 1e-8);
    const JointVector tau = rnea(arm(), th, thd, thdd);
    CHECK((mass_matrix(arm(), th) * thdd + C * thd + g - tau).cwiseAbs().maxCoeff() <= 1e-6);
  }
  ManipulatorModel weightless = arm();
  weightless.gravity = Vec3::Zero();
  CHECK(gravity_vector(weightless, random_joints()).norm() == 0.0);
  CHECK(rnea(weightless, random_joints(), JointVector::Zero(), JointVector::Zero()).norm() == 0.0);
}

TEST_CASE("coriolis matrix: linearity and skew symmetry of H_dot - 2C") {
  const double h = 1e-6;
  for (int n = 0; n < 100; ++n) {
    const JointVector th = random_joints(), thd = random_joints(2.0);
    const Matrix6d C = coriolis_matrix(arm(), th, thd);
    CHECK(coriolis_matrix(arm(), th, JointVector::Zero()).norm() == 0.0);
    CHECK((coriolis_matrix(arm(), th, 2.0 * thd) - 2.0 * C).cwiseAbs().maxCoeff() <= 1e-9);
    const Matrix6d Hdot = (mass_matrix(arm(), th + h * thd) - mass_matrix(arm(), th - h * thd)) / (2 * h);
    const Matrix6d N = Hdot - 2.0 * C;
    CHECK((N + N.transpose()).cwiseAbs().maxCoeff() <= 1e-5);
    const JointVector z = random_joints(1.0);
    CHECK(std::abs(z.dot(N * z)) <= 1e-5 * z.squaredNorm());
  }
}

TEST_CASE("gravity vector is the gradient of the potential energy") {
  const double h = 1e-6;
  for (int n = 0; n < 200; ++n) {
    const JointVector th = random_joints();
    CHECK(potential_energy(arm(), th) == doctest::Approx(oracle_potential(arm(), th)).epsilon(1e-12));
    JointVector grad;
    for (int j = 0; j < kNumJoints; ++j) {
      grad[j] = (oracle_potential(arm(), th + h * unit(j)) - oracle_potential(arm(), th - h * unit(j))) / (2 * h);
    }
    CHECK((gravity_vector(arm(), th) - grad).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("forward dynamics inverts inverse dynamics") {
  for (int n = 0; n < 500; ++n) {
    const JointVector th = random_joints(), thd = random_joints(2.0), thdd = random_joints(5.0);
    const JointVector tau = rnea(arm(), th, thd, thdd);
    CHECK((forward_dynamics(arm(), th, thd, tau) - thdd).cwiseAbs().maxCoeff() <= 1e-8);
  }
  const JointVector th = random_joints();
  CHECK(forward_dynamics(arm(), th, JointVector::Zero(), gravity_vector(arm(), th)).norm() <= 1e-10);
}

TEST_CASE("energy conservation under zero torque") {
  SUBCASE("no gravity") {
    ManipulatorModel m = arm();
    m.gravity = Vec3::Zero();
    JointState s{random_joints(), random_joints(1.0)};
    const double e0 = total_energy(m, s);
    for (int k = 0; k < 50000; ++k) s = rk4_step(m, s, JointVector::Zero(), 1e-4);
    CHECK(std::abs(total_energy(m, s) - e0) / e0 <= 1e-6);
  }
  SUBCASE("with gravity") {
    JointState s{random_joints(), random_joints(1.0)};
    const double e0 = total_energy(arm(), s);
    const double scale = kinetic_energy(arm(), s) + std::abs(potential_energy(arm(), s.theta));
    for (int k = 0; k < 20000; ++k) s = rk4_step(arm(), s, JointVector::Zero(), 1e-4);
    CHECK(std::abs(total_energy(arm(), s) - e0) / scale <= 1e-5);
  }
}

TEST_CASE("single-joint pendulum period") {
  // Base tilted so the first joint axis is horizontal; the other joints are
  // held at zero and the whole arm swings as one rigid body about that axis.
  ManipulatorModel m = arm();
  m.base.q = from_axis_angle(Vec3::UnitX(), kPi / 2);
  const Vec3 axis = to_rotation_matrix(m.base.q) * Vec3::UnitZ();

  // Independent small-oscillation constants from the link parameters.
  const auto period_at = [&](double theta1) {
    JointVector th = JointVector::Zero();
    th[0] = theta1;
    const auto T = oracle_chain(m, th);
    double inertia = 0.0, mass = 0.0;
    Vec3 moment = Vec3::Zero();
    for (int i = 0; i < kNumJoints; ++i) {
      const LinkParams& l = m.links[static_cast<std::size_t>(i)];
      const RotMat3 R = T[static_cast<std::size_t>(i) + 1].topLeftCorner<3, 3>();
      const Vec3 r = oracle_com(m, T, i) - m.base.p;
      const Vec3 r_perp = r - r.dot(axis) * axis;
      inertia += axis.dot(R * l.inertia * R.transpose() * axis) + l.mass * r_perp.squaredNorm();
      mass += l.mass;
      moment += l.mass * r_perp;
    }
    const double ell = moment.norm() / mass;
    return 2.0 * kPi * std::sqrt(inertia / (mass * m.gravity.norm() * ell));
  };

  // Stable equilibrium of the library's gravity torque.
  const auto g1 = [&](double x) {
    JointVector th = JointVector::Zero();
    th[0] = x;
    return gravity_vector(m, th)[0];
  };
  double eq = 0.0;
  for (double start = -kPi; start < kPi; start += 0.5) {
    double x = start;
    for (int it = 0; it < 50; ++it) x -= g1(x) / ((g1(x + 1e-6) - g1(x - 1e-6)) / 2e-6);
    if (std::abs(g1(x)) < 1e-10 && (g1(x + 1e-4) - g1(x - 1e-4)) > 0.0) {
      eq = x;
      break;
    }
  }
  REQUIRE(std::abs(g1(eq)) < 1e-10);

  JointVector th = JointVector::Zero();
  th[0] = eq;
  const double h11 = mass_matrix(m, th)(0, 0);
  const auto rhs = [&](double, const Eigen::Vector2d& x) -> Eigen::Vector2d {
    return {x[1], -g1(x[0]) / h11};
  };
  Eigen::Vector2d x(eq + 0.01, 0.0);
  const double dt = 1e-3;
  double t = 0.0, first = -1.0, last = -1.0;
  int crossings = 0;
  double prev = x[0] - eq;
  while (crossings < 6) {
    x = rk4_step(rhs, t, x, dt);
    t += dt;
    const double cur = x[0] - eq;
    if (prev < 0.0 && cur >= 0.0) {
      const double tc = t - dt * cur / (cur - prev);
      if (first < 0.0) first = tc;
      last = tc;
      ++crossings;
    }
    prev = cur;
  }
  const double measured = (last - first) / (crossings - 1);
  const double expected = period_at(eq);
  CHECK(std::abs(measured - expected) / expected <= 5e-3);
  CHECK(std::abs(period_at(eq + 1.0) - expected) / expected <= 1e-12);
}

TEST_CASE("manipulability and condition number") {
  CHECK(manipulability(Matrix6d::Identity()) == 1.0);
  CHECK(condition_number(Matrix6d::Identity()) == doctest::Approx(1.0));
  Matrix6d D = Vector6d(1, 2, 3, 4, 5, 10).asDiagonal();
  CHECK(manipulability(D) == doctest::Approx(1200.0));
  CHECK(condition_number(D) == doctest::Approx(10.0));
  const Matrix6d J = geometric_jacobian(arm(), random_joints());
  CHECK(condition_number(3.7 * J) == doctest::Approx(condition_number(J)).epsilon(1e-12));
  D(5, 5) = 0.0;
  CHECK(manipulability(D) == 0.0);
  CHECK(std::isinf(condition_number(D)));

  const Matrix6d J_home = geometric_jacobian(arm(), JointVector::Zero());
  CHECK(condition_number(J_home) < 10.0);
  JointVector wrist = JointVector::Zero();
  wrist[4] = kPi / 2;  // wrist axes 4 and 6 aligned
  CHECK(condition_number(geometric_jacobian(arm(), wrist)) > 1e12);
  CHECK(manipulability(geometric_jacobian(arm(), wrist)) <= 1e-12);
}
