#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "quatslide/control.hpp"
#include "quatslide/dynamics.hpp"
#include "quatslide/sliding.hpp"
#include "quatslide/trajectory.hpp"

namespace quatslide {

struct SimConfig {
  double dt = 1e-3;
  double duration = 10.0;
  int log_stride = 1;
  ManipulatorModel model;
  ControllerConfig controller;
  TrajectorySpec trajectory;             // task-space modes
  JointTrajectorySpec joint_trajectory;  // JointSpace mode
  JointState initial;
  /// Window for the decay-rate fits in RunMetrics.
  RateFitWindow fit{1e-6, 0.5, 1.0, 10.0, 0.2};

  /// Throws ConfigError (0 < dt <= 1e-2, duration >= dt, log_stride >= 1,
  /// plus the controller/trajectory/model checks).
  void validate() const;
};

/// One logged step. tau is the torque held over [t, t + dt).
struct SimRecord {
  double t = 0.0;
  JointVector theta = JointVector::Zero();
  JointVector theta_dot = JointVector::Zero();
  JointVector tau = JointVector::Zero();
  Vec3 p = Vec3::Zero();
  Vec3 p_d = Vec3::Zero();
  UnitQuaternion q;
  UnitQuaternion q_d;
  UnitQuaternion q_e;
  Vec3 s_p = Vec3::Zero();
  Vec3 s_q = Vec3::Zero();
  double qvec_e_sq = 0.0;
  double cond_J = 1.0;
};

enum class AbortKind { None, SingularJacobian, NumericalDivergence };

struct RunMetrics {
  std::optional<double> fitted_rate_position;
  std::optional<double> fitted_rate_orientation;
  double final_p_err = 0.0;
  double final_qvec_err = 0.0;
  double path_length = 0.0;
  double final_sign = 1.0;
  AbortKind abort_kind = AbortKind::None;
  std::string abort_reason;
  double abort_time = 0.0;
  /// Max over steps of ||J (th_d - th_d_r) - [s_p; s_q]||_inf (task modes).
  double max_identity_residual = 0.0;
  /// Max over steps of | ||q|| - 1 |.
  double max_quat_norm_error = 0.0;
  double max_condition = 0.0;
  std::size_t steps = 0;

  bool aborted() const { return abort_kind != AbortKind::None; }
};

struct SimResult {
  std::vector<SimRecord> trace;
  RunMetrics metrics;
  // Per-step series (every integrator step, independent of log_stride).
  std::vector<double> t;
  std::vector<double> p_err;
  std::vector<double> qvec_err;
};

/// Classical RK4 on (theta, theta_dot) with tau held constant over the step.
/// Throws NumericalDivergence on a non-finite result.
JointState rk4_step(const ManipulatorModel& model, const JointState& state, const JointVector& tau,
                    double dt);

using RecordSink = std::function<void(const SimRecord&)>;

/// Runs the closed loop. Singular-Jacobian and divergence aborts end the run
/// early and are reported in the metrics; the final logged record then
/// carries the state at the abort with tau = 0. Deterministic for a fixed
/// config.
SimResult run_scenario(const SimConfig& config, const RecordSink& sink = {});

/// Fixed column order, header first.
std::vector<std::string> trace_csv_columns();
void write_trace_csv_header(std::ostream& os);
void write_trace_csv_row(std::ostream& os, const SimRecord& record);

nlohmann::json metrics_to_json(const RunMetrics& metrics);

/// Process exit code for a finished run: 0, 2 (singular), 3 (divergence).
int exit_code_for(const RunMetrics& metrics);

}  // namespace quatslide
