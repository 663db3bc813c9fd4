#include "quatslide/demos.hpp"

namespace quatslide {

namespace {

// 350 degrees.
constexpr const char* kUnwindingTemplate = R"json({
  "name": "unwinding-%LABEL%",
  "sim": {"dt": 0.001, "duration": 10.0},
  "model": "reference",
  "controller": {"mode": "%MODE%", "lambda": 2.0, "sigma": 2.0},
  "initial": {"theta": [0, 0, 0, 0, 0, 0]},
  "trajectory": {
    "variant": "set_point",
    "offset": {"axis": [0, 0, 1], "angle": 6.1086523819801535}
  }
})json";

std::string unwinding_run(const std::string& label, const std::string& mode) {
  std::string s = kUnwindingTemplate;
  const auto replace = [&s](const std::string& key, const std::string& value) {
    for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key)) s.replace(pos, key.size(), value);
  };
  replace("%LABEL%", label);
  replace("%MODE%", mode);
  return s;
}

std::vector<Demo> make_demos() {
  std::vector<Demo> demos;
  demos.push_back({"setpoint",
                   "regulate to a pose offset by 5 cm and 0.5 rad from home",
                   {{"", R"json({
  "name": "setpoint",
  "sim": {"dt": 0.001, "duration": 8.0},
  "model": "reference",
  "controller": {"mode": "task_local", "lambda": 2.0, "sigma": 2.0},
  "initial": {"theta": [0, 0, 0, 0, 0, 0]},
  "trajectory": {
    "variant": "set_point",
    "offset": {"p": [0.03, -0.03, 0.03], "axis": [0.3, -0.5, 0.8], "angle": 0.5}
  }
})json"}}});
  demos.push_back({"tracking",
                   "sinusoidal position with a constant-axis slew, local-frame sliding variable",
                   {{"", R"json({
  "name": "tracking",
  "sim": {"dt": 0.001, "duration": 10.0},
  "model": "reference",
  "controller": {"mode": "task_local", "lambda": 2.0, "sigma": 2.0},
  "initial": {"theta": [0, 0, 0, 0, 0, 0]},
  "trajectory": {
    "variant": "sinusoid_rotation",
    "offset": {"p": [0.03, -0.02, 0.04], "axis": [0.2, -0.4, 1.0], "angle": 0.4},
    "amplitude": [0.05, 0.04, 0.03],
    "frequency": [0.2, 0.15, 0.1],
    "axis": [0.3, 0.2, 1.0],
    "rate": 0.15
  }
})json"}}});
  demos.push_back({"unwinding",
                   "350 degree initial error: sgn-based controller vs. naive baseline",
                   {{"local", unwinding_run("local", "task_local")},
                    {"naive", unwinding_run("naive", "task_naive_no_sgn")}}});
  demos.push_back({"global-frame",
                   "tracking demo with the inertial-frame sliding variable",
                   {{"", R"json({
  "name": "global-frame",
  "sim": {"dt": 0.001, "duration": 10.0},
  "model": "reference",
  "controller": {"mode": "task_global", "lambda": 2.0, "sigma": 2.0},
  "initial": {"theta": [0, 0, 0, 0, 0, 0]},
  "trajectory": {
    "variant": "sinusoid_rotation",
    "frame": "global",
    "offset": {"p": [0.03, -0.02, 0.04], "axis": [0.2, -0.4, 1.0], "angle": 0.4},
    "amplitude": [0.05, 0.04, 0.03],
    "frequency": [0.2, 0.15, 0.1],
    "axis": [0.3, 0.2, 1.0],
    "rate": 0.15
  }
})json"}}});
  return demos;
}

}  // namespace

const std::vector<Demo>& builtin_demos() {
  static const std::vector<Demo> demos = make_demos();
  return demos;
}

const Demo* find_demo(std::string_view name) {
  for (const Demo& d : builtin_demos()) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

}  // namespace quatslide
