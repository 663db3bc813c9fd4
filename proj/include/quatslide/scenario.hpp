#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "quatslide/sim.hpp"

namespace quatslide {

/// A scenario document resolved into a runnable configuration.
struct Scenario {
  std::string name;
  SimConfig config;
  std::filesystem::path output_dir;
  /// The input with every default filled in and the trajectory anchor
  /// resolved to absolute coordinates.
  nlohmann::json resolved;
};

/// Scenario document blocks (all optional except where noted):
///   name:       string
///   sim:        {dt, duration, log_stride, fit_start}
///   model:      "reference" | path (relative to base_dir) | inline model object
///   controller: {mode, lambda, sigma, K (scalar | [6] diagonal | [36] row-major),
///                K_scale, cond_abort}
///   initial:    {theta[6], theta_dot[6]} | {pose: {p[3], q[4]}, seed[6]}
///   trajectory: {variant, frame, anchor, offset, amplitude, frequency, axis,
///                rate, slew_angle, slew_duration}    (task-space modes)
///               anchor is "initial" (FK of the initial joints, default),
///               {p[3], q[4]}, or {theta[6]} (FK of those joints)
///               {variant: "joint_sinusoid", theta0, amplitude, frequency} (joint_space)
///   outputs:    {dir}
/// Unknown keys are rejected. Throws ConfigError.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace quatslide
