#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "quatslide/dynamics.hpp"

namespace quatslide {

/// Parses a JSON file. Syntax errors become ConfigError with
/// "<path>:<line>:<column>: <message>".
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Same as read_json_file for in-memory text; `origin` names the source in
/// diagnostics.
nlohmann::json parse_json_text(std::string_view text, const std::string& origin);

/// Model document:
///   { "links": [6 x {a, alpha, d, theta_offset, mass, com[3], inertia[9]}],
///     "gravity": [3], "base_pose": {"p": [3], "q": [w, x, y, z]} }
/// inertia is row-major about the com in the link frame. gravity and
/// base_pose are optional. Throws ConfigError.
ManipulatorModel model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const ManipulatorModel& model);
ManipulatorModel load_model(const std::filesystem::path& path);

/// The bundled 6-R arm (same content as models/reference_arm.json).
const ManipulatorModel& reference_model();
std::string_view reference_model_json();

}  // namespace quatslide
