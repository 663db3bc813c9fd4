#include "quatslide/scenario.hpp"

#include <set>
#include <sstream>

#include "quatslide/errors.hpp"
#include "quatslide/model_io.hpp"

namespace quatslide {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return obj[key].get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> vector_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != N) {
    std::ostringstream os;
    os << where << ": expected an array of " << N << " numbers";
    throw ConfigError(os.str());
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": entries must be numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

template <int N>
Eigen::Matrix<double, N, 1> vector_or(const json& obj, const char* key, const Eigen::Matrix<double, N, 1>& fallback,
                                      const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return vector_of<N>(obj[key], where + "." + key);
}

UnitQuaternion quaternion_of(const json& j, const std::string& where) {
  const Eigen::Vector4d c = vector_of<4>(j, where);
  try {
    return normalize(Quat::from_coeffs(c));
  } catch (const DegenerateQuaternion&) {
    throw ConfigError(where + ": zero quaternion");
  }
}

template <class Vec>
json to_array(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json quat_array(const UnitQuaternion& q) { return to_array(q.coeffs()); }

ManipulatorModel resolve_model(const json& doc, const std::filesystem::path& base_dir, json& echo) {
  if (!doc.contains("model")) {
    echo = "reference";
    return reference_model();
  }
  const json& m = doc["model"];
  if (m.is_string()) {
    const std::string s = m.get<std::string>();
    echo = s;
    if (s == "reference") return reference_model();
    std::filesystem::path p(s);
    if (p.is_relative()) p = base_dir / p;
    return load_model(p);
  }
  if (m.is_object()) {
    ManipulatorModel model;
    try {
      model = model_from_json(m);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
    echo = model_to_json(model);
    return model;
  }
  throw ConfigError("model: expected \"reference\", a file path, or an inline model object");
}

Matrix6d gain_matrix(const json& c, const ManipulatorModel& model, double scale) {
  if (!c.contains("K") || c["K"].is_null()) return default_gain_matrix(model, scale);
  const json& k = c["K"];
  if (k.is_number()) return k.get<double>() * Matrix6d::Identity();
  if (k.is_array() && k.size() == 6) return Matrix6d(vector_of<6>(k, "controller.K").asDiagonal());
  if (k.is_array() && k.size() == 36) {
    const auto v = vector_of<36>(k, "controller.K");
    return Eigen::Map<const Eigen::Matrix<double, 6, 6, Eigen::RowMajor>>(v.data());
  }
  throw ConfigError("controller.K: expected a number, 6 diagonal entries, or 36 row-major entries");
}

Frame frame_of(const json& t, ControlMode mode) {
  const Frame fallback = mode == ControlMode::TaskGlobal ? Frame::Global : Frame::Local;
  if (!t.contains("frame")) return fallback;
  if (!t["frame"].is_string()) throw ConfigError("trajectory.frame: expected \"local\" or \"global\"");
  const std::string f = t["frame"].get<std::string>();
  if (f == "local") return Frame::Local;
  if (f == "global") return Frame::Global;
  throw ConfigError("trajectory.frame: expected \"local\" or \"global\", got \"" + f + "\"");
}

}  // namespace

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "scenario", {"name", "sim", "model", "controller", "initial", "trajectory", "outputs"});
  Scenario sc;
  SimConfig& cfg = sc.config;
  json& echo = sc.resolved;

  sc.name = "scenario";
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ConfigError("name: expected a string");
    sc.name = doc["name"].get<std::string>();
  }
  echo["name"] = sc.name;

  // sim
  const json sim = doc.value("sim", json::object());
  check_keys(sim, "sim", {"dt", "duration", "log_stride", "fit_start"});
  cfg.dt = number_or(sim, "dt", 1e-3, "sim");
  cfg.duration = number_or(sim, "duration", 10.0, "sim");
  if (sim.contains("log_stride") && !sim["log_stride"].is_number_integer())
    throw ConfigError("sim.log_stride: expected an integer");
  cfg.log_stride = sim.value("log_stride", 1);
  cfg.fit.t_start = number_or(sim, "fit_start", 1.0, "sim");
  echo["sim"] = {{"dt", cfg.dt}, {"duration", cfg.duration}, {"log_stride", cfg.log_stride},
                 {"fit_start", cfg.fit.t_start}};

  // model
  cfg.model = resolve_model(doc, base_dir, echo["model"]);

  // controller
  const json ctrl = doc.value("controller", json::object());
  check_keys(ctrl, "controller", {"mode", "lambda", "sigma", "K", "K_scale", "cond_abort"});
  const std::string mode_name = ctrl.value("mode", std::string("task_local"));
  const auto mode = parse_control_mode(mode_name);
  if (!mode) throw ConfigError("controller.mode: unknown mode \"" + mode_name + "\"");
  cfg.controller.mode = *mode;
  cfg.controller.gains.lambda = number_or(ctrl, "lambda", 2.0, "controller");
  cfg.controller.gains.sigma = number_or(ctrl, "sigma", 2.0, "controller");
  const double k_scale = number_or(ctrl, "K_scale", kDefaultGainScale, "controller");
  cfg.controller.K = gain_matrix(ctrl, cfg.model, k_scale);
  cfg.controller.cond_abort = number_or(ctrl, "cond_abort", kDefaultConditionAbort, "controller");
  {
    json k = json::array();
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) k.push_back(cfg.controller.K(r, c));
    echo["controller"] = {{"mode", mode_name},
                          {"lambda", cfg.controller.gains.lambda},
                          {"sigma", cfg.controller.gains.sigma},
                          {"K", k},
                          {"cond_abort", cfg.controller.cond_abort}};
  }

  // initial state
  const json init = doc.value("initial", json::object());
  check_keys(init, "initial", {"theta", "theta_dot", "pose", "seed"});
  if (init.contains("pose")) {
    if (init.contains("theta")) throw ConfigError("initial: give either 'theta' or 'pose', not both");
    const json& pose = init["pose"];
    check_keys(pose, "initial.pose", {"p", "q"});
    if (!pose.contains("p") || !pose.contains("q")) throw ConfigError("initial.pose: needs both 'p' and 'q'");
    const Vec3 p = vector_of<3>(pose["p"], "initial.pose.p");
    const UnitQuaternion q = quaternion_of(pose["q"], "initial.pose.q");
    const JointVector seed = vector_or<6>(init, "seed", JointVector::Zero(), "initial");
    const IkResult ik = solve_ik(cfg.model, p, q, seed);
    if (!(ik.residual <= kReachabilityResidual)) {
      std::ostringstream os;
      os << "initial.pose: not reachable (IK residual " << ik.residual << ")";
      throw ConfigError(os.str());
    }
    cfg.initial.theta = ik.theta;
  } else {
    cfg.initial.theta = vector_or<6>(init, "theta", JointVector::Zero(), "initial");
  }
  cfg.initial.theta_dot = vector_or<6>(init, "theta_dot", JointVector::Zero(), "initial");
  echo["initial"] = {{"theta", to_array(cfg.initial.theta)}, {"theta_dot", to_array(cfg.initial.theta_dot)}};

  // trajectory
  const json traj = doc.value("trajectory", json::object());
  if (cfg.controller.mode == ControlMode::JointSpace) {
    check_keys(traj, "trajectory", {"variant", "theta0", "amplitude", "frequency"});
    const std::string variant = traj.value("variant", std::string("joint_sinusoid"));
    if (variant != "joint_sinusoid")
      throw ConfigError("trajectory.variant: joint_space mode needs \"joint_sinusoid\"");
    JointTrajectorySpec& js = cfg.joint_trajectory;
    js.theta0 = vector_or<6>(traj, "theta0", cfg.initial.theta, "trajectory");
    js.amplitude = vector_or<6>(traj, "amplitude", JointVector::Zero(), "trajectory");
    js.frequency = vector_or<6>(traj, "frequency", JointVector::Zero(), "trajectory");
    js.duration = cfg.duration;
    echo["trajectory"] = {{"variant", variant},
                          {"theta0", to_array(js.theta0)},
                          {"amplitude", to_array(js.amplitude)},
                          {"frequency", to_array(js.frequency)}};
  } else {
    check_keys(traj, "trajectory", {"variant", "frame", "anchor", "offset", "amplitude", "frequency", "axis", "rate",
                                    "slew_angle", "slew_duration"});
    TrajectorySpec& ts = cfg.trajectory;
    const std::string variant = traj.value("variant", std::string("set_point"));
    if (variant == "set_point") {
      ts.variant = TrajectoryVariant::SetPoint;
    } else if (variant == "sinusoid_rotation") {
      ts.variant = TrajectoryVariant::SinusoidRotation;
    } else if (variant == "geodesic_slew") {
      ts.variant = TrajectoryVariant::GeodesicSlew;
    } else {
      throw ConfigError("trajectory.variant: unknown variant \"" + variant + "\"");
    }
    ts.frame = frame_of(traj, cfg.controller.mode);

    // Anchor pose, then the offset composed on top of it.
    Vec3 p0;
    UnitQuaternion q0;
    if (!traj.contains("anchor") || (traj["anchor"].is_string() && traj["anchor"] == "initial")) {
      const EndEffectorPose pose = forward_kinematics(cfg.model, cfg.initial.theta);
      p0 = pose.p;
      q0 = pose.q;
    } else if (traj["anchor"].is_object() && traj["anchor"].contains("theta")) {
      const json& a = traj["anchor"];
      check_keys(a, "trajectory.anchor", {"theta"});
      const EndEffectorPose pose = forward_kinematics(cfg.model, vector_of<6>(a["theta"], "trajectory.anchor.theta"));
      p0 = pose.p;
      q0 = pose.q;
    } else if (traj["anchor"].is_object()) {
      const json& a = traj["anchor"];
      check_keys(a, "trajectory.anchor", {"p", "q"});
      if (!a.contains("p") || !a.contains("q")) throw ConfigError("trajectory.anchor: needs both 'p' and 'q'");
      p0 = vector_of<3>(a["p"], "trajectory.anchor.p");
      q0 = quaternion_of(a["q"], "trajectory.anchor.q");
    } else {
      throw ConfigError("trajectory.anchor: expected \"initial\", {p, q} or {theta}");
    }
    if (traj.contains("offset")) {
      const json& o = traj["offset"];
      check_keys(o, "trajectory.offset", {"p", "axis", "angle"});
      p0 += vector_or<3>(o, "p", Vec3::Zero(), "trajectory.offset");
      const double angle = number_or(o, "angle", 0.0, "trajectory.offset");
      if (angle != 0.0) {
        const Vec3 axis = vector_or<3>(o, "axis", Vec3(0, 0, 1), "trajectory.offset");
        try {
          q0 = q0 * from_axis_angle(axis, angle);
        } catch (const DegenerateAxis&) {
          throw ConfigError("trajectory.offset.axis: must be nonzero");
        }
      }
    }
    ts.p0 = p0;
    ts.q0 = q0;
    ts.amplitude = vector_or<3>(traj, "amplitude", Vec3::Zero(), "trajectory");
    ts.frequency = vector_or<3>(traj, "frequency", Vec3::Zero(), "trajectory");
    ts.axis = vector_or<3>(traj, "axis", Vec3(0, 0, 1), "trajectory");
    ts.rate = number_or(traj, "rate", 0.0, "trajectory");
    ts.slew_angle = number_or(traj, "slew_angle", 0.0, "trajectory");
    ts.slew_duration = number_or(traj, "slew_duration", cfg.duration, "trajectory");
    ts.duration = cfg.duration;
    echo["trajectory"] = {{"variant", variant},
                          {"frame", ts.frame == Frame::Local ? "local" : "global"},
                          {"anchor", {{"p", to_array(ts.p0)}, {"q", quat_array(ts.q0)}}},
                          {"amplitude", to_array(ts.amplitude)},
                          {"frequency", to_array(ts.frequency)},
                          {"axis", to_array(ts.axis)},
                          {"rate", ts.rate},
                          {"slew_angle", ts.slew_angle},
                          {"slew_duration", ts.slew_duration}};
  }

  // outputs
  const json outputs = doc.value("outputs", json::object());
  check_keys(outputs, "outputs", {"dir"});
  if (outputs.contains("dir") && !outputs["dir"].is_string()) throw ConfigError("outputs.dir: expected a string");
  sc.output_dir = outputs.value("dir", std::string("out/") + sc.name);
  echo["outputs"] = {{"dir", sc.output_dir.string()}};

  cfg.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  try {
    return scenario_from_json(doc, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace quatslide
