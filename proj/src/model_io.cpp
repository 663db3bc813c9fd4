#include "quatslide/model_io.hpp"

#include <fstream>
#include <sstream>

#include "quatslide/errors.hpp"

namespace quatslide {

namespace detail {
extern const std::string_view kReferenceModelJson;
}

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

template <int N>
Eigen::Matrix<double, N, 1> read_vector(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != N) {
    std::ostringstream os;
    os << what << ": expected an array of " << N << " numbers";
    throw ConfigError(os.str());
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!j[i].is_number()) throw ConfigError(what + ": entries must be numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

double read_number(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  if (!obj[key].is_number()) throw ConfigError(where + ": field '" + key + "' must be a number");
  return obj[key].get<double>();
}

}  // namespace

nlohmann::json parse_json_text(std::string_view text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // byte is 1-based and points just past the offending character.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_column(text, byte);
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": " << e.what();
    throw ConfigError(os.str());
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path.string());
}

ManipulatorModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("model: expected a JSON object");
  if (!doc.contains("links") || !doc["links"].is_array())
    throw ConfigError("model: missing 'links' array");
  const auto& links = doc["links"];
  if (links.size() != kNumJoints) {
    std::ostringstream os;
    os << "model: expected exactly " << kNumJoints << " links, got " << links.size();
    throw ConfigError(os.str());
  }
  ManipulatorModel model;
  for (int i = 0; i < kNumJoints; ++i) {
    const auto& l = links[i];
    const std::string where = "model.links[" + std::to_string(i) + "]";
    if (!l.is_object()) throw ConfigError(where + ": expected an object");
    LinkParams& p = model.links[i];
    p.a = read_number(l, "a", where);
    p.alpha = read_number(l, "alpha", where);
    p.d = read_number(l, "d", where);
    p.theta_offset = l.contains("theta_offset") ? read_number(l, "theta_offset", where) : 0.0;
    p.mass = read_number(l, "mass", where);
    if (!l.contains("com")) throw ConfigError(where + ": missing field 'com'");
    p.com = read_vector<3>(l["com"], where + ".com");
    if (!l.contains("inertia")) throw ConfigError(where + ": missing field 'inertia'");
    const Eigen::Matrix<double, 9, 1> I = read_vector<9>(l["inertia"], where + ".inertia");
    p.inertia = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(I.data());
  }
  if (doc.contains("gravity")) model.gravity = read_vector<3>(doc["gravity"], "model.gravity");
  if (doc.contains("base_pose")) {
    const auto& bp = doc["base_pose"];
    if (!bp.is_object()) throw ConfigError("model.base_pose: expected an object");
    if (bp.contains("p")) model.base.p = read_vector<3>(bp["p"], "model.base_pose.p");
    if (bp.contains("q")) {
      const Eigen::Vector4d q = read_vector<4>(bp["q"], "model.base_pose.q");
      try {
        model.base.q = normalize(Quat::from_coeffs(q));
      } catch (const DegenerateQuaternion&) {
        throw ConfigError("model.base_pose.q: zero quaternion");
      }
    }
  }
  model.validate();
  return model;
}

nlohmann::json model_to_json(const ManipulatorModel& model) {
  nlohmann::json links = nlohmann::json::array();
  for (const LinkParams& l : model.links) {
    nlohmann::json inertia = nlohmann::json::array();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) inertia.push_back(l.inertia(r, c));
    links.push_back({{"a", l.a},
                     {"alpha", l.alpha},
                     {"d", l.d},
                     {"theta_offset", l.theta_offset},
                     {"mass", l.mass},
                     {"com", {l.com.x(), l.com.y(), l.com.z()}},
                     {"inertia", inertia}});
  }
  const Quat& q = model.base.q.quat();
  return {{"links", links},
          {"gravity", {model.gravity.x(), model.gravity.y(), model.gravity.z()}},
          {"base_pose",
           {{"p", {model.base.p.x(), model.base.p.y(), model.base.p.z()}}, {"q", {q.w, q.x, q.y, q.z}}}}};
}

ManipulatorModel load_model(const std::filesystem::path& path) {
  const nlohmann::json doc = read_json_file(path);
  try {
    return model_from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string_view reference_model_json() { return detail::kReferenceModelJson; }

const ManipulatorModel& reference_model() {
  static const ManipulatorModel model =
      model_from_json(parse_json_text(reference_model_json(), "reference_arm.json"));
  return model;
}

}  // namespace quatslide
