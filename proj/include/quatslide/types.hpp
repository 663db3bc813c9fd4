#pragma once

#include <Eigen/Dense>

namespace quatslide {

using Vec3 = Eigen::Vector3d;
using RotMat3 = Eigen::Matrix3d;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using JointVector = Vector6d;

inline constexpr int kNumJoints = 6;

// Which frame an angular velocity vector is expressed in.
enum class Frame { Local, Global };

}  // namespace quatslide
