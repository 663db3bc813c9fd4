#include "quatslide/sim.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "quatslide/errors.hpp"
#include "quatslide/integrator.hpp"

namespace quatslide {

namespace {

using Vector12d = Eigen::Matrix<double, 12, 1>;

void put_number(std::ostream& os, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  os.write(buf, res.ptr - buf);
}

template <class Vec>
void put_all(std::ostream& os, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    os << ',';
    put_number(os, v[i]);
  }
}

// Reference for logging in joint-space mode: the pose and twist of the
// desired joint configuration.
TaskReference joint_reference_as_task(const ManipulatorModel& model, const JointReference& jref,
                                      const std::optional<UnitQuaternion>& previous_q_d) {
  const TaskKinematics kin = task_kinematics(model, {jref.theta_d, jref.theta_dot_d}, previous_q_d);
  TaskReference ref;
  ref.p_d = kin.p;
  ref.q_d = kin.q;
  ref.v_d = kin.v;
  ref.omega_d = kin.omega;
  ref.frame = Frame::Local;
  return ref;
}

SimRecord make_record(double t, const JointState& state, const JointVector& tau, const TaskKinematics& kin,
                      const TaskReference& ref, const TaskErrors& err) {
  SimRecord r;
  r.t = t;
  r.theta = state.theta;
  r.theta_dot = state.theta_dot;
  r.tau = tau;
  r.p = kin.p;
  r.p_d = ref.p_d;
  r.q = kin.q;
  r.q_d = ref.q_d;
  r.q_e = err.orientation.q_e;
  r.s_p = err.sliding.s_p;
  r.s_q = err.sliding.s_q;
  r.qvec_e_sq = qvec_squared_norm(err.orientation.q_e);
  r.cond_J = kin.condition;
  return r;
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0 && dt <= 1e-2)) throw ConfigError("sim.dt must satisfy 0 < dt <= 1e-2");
  if (!(duration >= dt) || !std::isfinite(duration)) throw ConfigError("sim.duration must be >= dt");
  if (log_stride < 1) throw ConfigError("sim.log_stride must be >= 1");
  model.validate();
  controller.validate();
  if (controller.mode == ControlMode::JointSpace) {
    joint_trajectory.validate();
  } else {
    trajectory.validate();
  }
  if (!initial.theta.allFinite() || !initial.theta_dot.allFinite())
    throw ConfigError("initial joint state must be finite");
}

JointState rk4_step(const ManipulatorModel& model, const JointState& state, const JointVector& tau, double dt) {
  if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be > 0");
  const auto rhs = [&](double, const Vector12d& x) -> Vector12d {
    const JointVector theta = x.head<kNumJoints>();
    const JointVector theta_dot = x.tail<kNumJoints>();
    Vector12d dx;
    dx << theta_dot, forward_dynamics(model, theta, theta_dot, tau);
    return dx;
  };
  Vector12d x;
  x << state.theta, state.theta_dot;
  const Vector12d next = rk4_step(rhs, 0.0, x, dt);
  if (!next.allFinite()) throw NumericalDivergence("non-finite joint state after integration step");
  return {next.head<kNumJoints>(), next.tail<kNumJoints>()};
}

SimResult run_scenario(const SimConfig& config, const RecordSink& sink) {
  config.validate();
  const ManipulatorModel& model = config.model;
  const ControllerConfig& cfg = config.controller;
  const bool joint_mode = cfg.mode == ControlMode::JointSpace;
  const std::size_t n_steps = static_cast<std::size_t>(std::llround(config.duration / config.dt));
  const double dt = config.dt;

  SimResult result;
  RunMetrics& m = result.metrics;
  std::vector<double> omega_norm;
  result.t.reserve(n_steps + 1);
  result.p_err.reserve(n_steps + 1);
  result.qvec_err.reserve(n_steps + 1);
  omega_norm.reserve(n_steps + 1);

  const auto emit = [&](const SimRecord& r) {
    result.trace.push_back(r);
    if (sink) sink(r);
  };

  JointState state = config.initial;
  std::optional<UnitQuaternion> previous_q;
  std::optional<UnitQuaternion> previous_q_d;
  std::optional<ReferenceVelocity> previous_ref;
  TaskReference last_ref;
  UnitQuaternion last_q;

  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const TaskKinematics kin = task_kinematics(model, state, previous_q);
    previous_q = kin.q;

    TaskReference ref;
    JointReference jref;
    if (joint_mode) {
      jref = sample(config.joint_trajectory, std::min(t, config.joint_trajectory.duration));
      ref = joint_reference_as_task(model, jref, previous_q_d);
      previous_q_d = ref.q_d;
    } else {
      ref = sample(config.trajectory, std::min(t, config.trajectory.duration));
    }

    JointVector tau = JointVector::Zero();
    TaskErrors err;
    bool abort_now = false;
    try {
      if (joint_mode) {
        tau = slotine_li_joint(model, state, jref, cfg).tau;
        err = task_errors(kin, ref, cfg);
      } else {
        const IkTorqueOutput out = ik_torque(model, state, kin, ref, cfg, previous_ref, dt);
        tau = out.tau;
        err = out.errors;
        previous_ref = out.ref;
        m.max_identity_residual = std::max(m.max_identity_residual, out.identity_residual);
      }
    } catch (const SingularJacobian& e) {
      m.abort_kind = AbortKind::SingularJacobian;
      m.abort_reason = e.what();
      abort_now = true;
    } catch (const NumericalDivergence& e) {
      m.abort_kind = AbortKind::NumericalDivergence;
      m.abort_reason = e.what();
      abort_now = true;
    }
    if (abort_now) {
      m.abort_time = t;
      err = task_errors(kin, ref, cfg);
      tau = JointVector::Zero();
    }

    const double p_err = err.position.p_e.norm();
    const double qvec_err = err.orientation.q_e.vec().norm();
    result.t.push_back(t);
    result.p_err.push_back(p_err);
    result.qvec_err.push_back(qvec_err);
    omega_norm.push_back(kin.omega.norm());
    m.max_quat_norm_error = std::max(m.max_quat_norm_error, std::abs(kin.q.quat().norm() - 1.0));
    m.max_condition = std::max(m.max_condition, kin.condition);
    m.final_p_err = p_err;
    m.final_qvec_err = qvec_err;
    m.steps = k;
    last_ref = ref;
    last_q = kin.q;

    if (abort_now || k % static_cast<std::size_t>(config.log_stride) == 0 || k == n_steps)
      emit(make_record(t, state, tau, kin, ref, err));
    if (abort_now || k == n_steps) break;

    try {
      state = rk4_step(model, state, tau, dt);
    } catch (const NumericalDivergence& e) {
      m.abort_kind = AbortKind::NumericalDivergence;
      m.abort_reason = e.what();
      m.abort_time = t + dt;
      break;
    }
  }

  m.fitted_rate_position = fit_exponential_rate(result.t, result.p_err, config.fit);
  m.fitted_rate_orientation = fit_exponential_rate(result.t, result.qvec_err, config.fit);
  const UnwindingMetrics uw = unwinding_metrics(result.t, omega_norm, last_q, last_ref.q_d);
  m.path_length = uw.path_length;
  m.final_sign = uw.final_sign;
  return result;
}

std::vector<std::string> trace_csv_columns() {
  std::vector<std::string> cols{"t"};
  const auto add6 = [&](const std::string& prefix) {
    for (int i = 1; i <= kNumJoints; ++i) cols.push_back(prefix + "_" + std::to_string(i));
  };
  const auto add = [&](const std::string& prefix, std::initializer_list<const char*> suffixes) {
    for (const char* s : suffixes) cols.push_back(prefix + "_" + s);
  };
  add6("theta");
  add6("theta_dot");
  add6("tau");
  add("p", {"x", "y", "z"});
  add("p_d", {"x", "y", "z"});
  add("q", {"w", "x", "y", "z"});
  add("q_d", {"w", "x", "y", "z"});
  add("q_e", {"w", "x", "y", "z"});
  add("s_p", {"x", "y", "z"});
  add("s_q", {"x", "y", "z"});
  cols.push_back("qvec_e_sq");
  cols.push_back("cond_J");
  return cols;
}

void write_trace_csv_header(std::ostream& os) {
  const auto cols = trace_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

void write_trace_csv_row(std::ostream& os, const SimRecord& r) {
  put_number(os, r.t);
  put_all(os, r.theta);
  put_all(os, r.theta_dot);
  put_all(os, r.tau);
  put_all(os, r.p);
  put_all(os, r.p_d);
  put_all(os, r.q.coeffs());
  put_all(os, r.q_d.coeffs());
  put_all(os, r.q_e.coeffs());
  put_all(os, r.s_p);
  put_all(os, r.s_q);
  os << ',';
  put_number(os, r.qvec_e_sq);
  os << ',';
  put_number(os, r.cond_J);
  os << '\n';
}

nlohmann::json metrics_to_json(const RunMetrics& m) {
  const auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json aborted = nullptr;
  if (m.aborted()) {
    aborted = {{"kind", m.abort_kind == AbortKind::SingularJacobian ? "singular_jacobian" : "numerical_divergence"},
               {"reason", m.abort_reason},
               {"t", m.abort_time}};
  }
  return {{"fitted_rate_position", opt(m.fitted_rate_position)},
          {"fitted_rate_orientation", opt(m.fitted_rate_orientation)},
          {"final_p_err", m.final_p_err},
          {"final_qvec_err", m.final_qvec_err},
          {"path_length", m.path_length},
          {"final_sign", m.final_sign},
          {"aborted", aborted},
          {"max_identity_residual", m.max_identity_residual},
          {"max_quat_norm_error", m.max_quat_norm_error},
          {"max_condition", m.max_condition},
          {"steps", m.steps}};
}

int exit_code_for(const RunMetrics& m) {
  switch (m.abort_kind) {
    case AbortKind::None: return 0;
    case AbortKind::SingularJacobian: return 2;
    case AbortKind::NumericalDivergence: return 3;
  }
  return 3;
}

}  // namespace quatslide
