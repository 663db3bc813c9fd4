#include "quatslide/sliding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "quatslide/errors.hpp"
#include "quatslide/integrator.hpp"

namespace quatslide {

namespace {

void check_flow_args(double lambda, double dt, double T) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
  if (!(T > dt) || !std::isfinite(T)) throw DomainError("T must exceed dt");
}

std::size_t step_count(double dt, double T) { return static_cast<std::size_t>(std::llround(T / dt)); }

UnitQuaternion renormalized(const Eigen::Vector4d& c, double t) {
  if (!c.allFinite()) {
    std::ostringstream os;
    os << "non-finite quaternion at t = " << t;
    throw NumericalDivergence(os.str());
  }
  return normalize(Quat::from_coeffs(c));
}

// sgn(q_e°) vec(q_e); invariant under q_e -> -q_e.
Vec3 signed_vec(const UnitQuaternion& q_e) { return sgn_modified(q_e.w()) * q_e.vec(); }

}  // namespace

void Gains::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be > 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be > 0");
}

UnitQuaternion error_quaternion(const UnitQuaternion& q_d, const UnitQuaternion& q) {
  return conjugate(q_d) * q;
}

Vec3 omega_error_local(const Vec3& omega, const Vec3& omega_d, const RotMat3& R_e) {
  return omega - R_e.transpose() * omega_d;
}

Vec3 s_q_local(const UnitQuaternion& q_e, const Vec3& omega_e, double lambda) {
  return omega_e + 2.0 * lambda * signed_vec(q_e);
}

Vec3 s_q_global(const UnitQuaternion& q_e, const Vec3& omega_e, const RotMat3& R_d, double lambda) {
  return omega_e + 2.0 * lambda * (R_d * signed_vec(q_e));
}

Vec3 s_p(const Vec3& p_e, const Vec3& v_e, double sigma) { return v_e + sigma * p_e; }

std::vector<FlowSample> qe_flow_on_manifold(const UnitQuaternion& q_e0, double lambda, double dt,
                                            double T) {
  check_flow_args(lambda, dt, T);
  const std::size_t n = step_count(dt, T);

  // sgn is evaluated on the stage state; the flow is smooth away from
  // q_e° = 0 and the equator is crossed transversally.
  const auto rhs = [lambda](double, const Eigen::Vector4d& c) -> Eigen::Vector4d {
    const Quat q = Quat::from_coeffs(c);
    const Vec3 omega_e = -2.0 * lambda * sgn_modified(q.w) * q.vec();
    return (0.5 * hamilton_product(q, Quat(0.0, omega_e))).coeffs();
  };

  std::vector<FlowSample> out;
  out.reserve(n + 1);
  out.push_back({0.0, q_e0});
  Eigen::Vector4d c = q_e0.coeffs();
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k - 1) * dt;
    c = rk4_step(rhs, t, c, dt);
    const UnitQuaternion q = renormalized(c, t + dt);
    c = q.coeffs();
    out.push_back({static_cast<double>(k) * dt, q});
  }
  return out;
}

std::vector<FlowSample> attitude_flow_on_manifold(
    Frame frame, const UnitQuaternion& q0,
    const std::function<AttitudeReference(double)>& reference, double lambda, double dt, double T) {
  check_flow_args(lambda, dt, T);
  const std::size_t n = step_count(dt, T);

  const auto rhs = [&](double t, const Eigen::Vector4d& c) -> Eigen::Vector4d {
    const AttitudeReference ref = reference(t);
    // Stage states are off S3 by O(dt^5); the error is formed from the raw
    // product so the rhs stays smooth in the state.
    const Quat q = Quat::from_coeffs(c);
    const Quat q_e = hamilton_product(conjugate(ref.q_d.quat()), q);
    const Vec3 sv = sgn_modified(q_e.w) * q_e.vec();
    if (frame == Frame::Local) {
      const RotMat3 R_e = to_rotation_matrix(normalize(q_e));
      const Vec3 omega = R_e.transpose() * ref.omega_d_local - 2.0 * lambda * sv;
      return (0.5 * hamilton_product(q, Quat(0.0, omega))).coeffs();
    }
    const RotMat3 R_d = to_rotation_matrix(ref.q_d);
    const Vec3 omega_world = R_d * ref.omega_d_local - 2.0 * lambda * (R_d * sv);
    return (0.5 * hamilton_product(Quat(0.0, omega_world), q)).coeffs();
  };

  std::vector<FlowSample> out;
  out.reserve(n + 1);
  out.push_back({0.0, error_quaternion(reference(0.0).q_d, q0)});
  Eigen::Vector4d c = q0.coeffs();
  for (std::size_t k = 1; k <= n; ++k) {
    const double t0 = static_cast<double>(k - 1) * dt;
    c = rk4_step(rhs, t0, c, dt);
    const double t = static_cast<double>(k) * dt;
    const UnitQuaternion q = renormalized(c, t);
    c = q.coeffs();
    out.push_back({t, error_quaternion(reference(t).q_d, q)});
  }
  return out;
}

double lemma1_solution(double x0, double sigma, double t) {
  if (!(x0 >= 0.0 && x0 < 1.0)) throw DomainError("lemma1_solution: x0 must lie in [0, 1)");
  if (!(sigma > 0.0)) throw DomainError("lemma1_solution: sigma must be > 0");
  if (!(t >= 0.0)) throw DomainError("lemma1_solution: t must be >= 0");
  const double y0 = std::sqrt(1.0 - x0);
  const double c = (1.0 - y0) / (1.0 + y0);
  const double ce = c * std::exp(-sigma * t);
  return 4.0 * ce / ((1.0 + ce) * (1.0 + ce));
}

std::optional<double> fit_exponential_rate(std::span<const double> t, std::span<const double> value,
                                           const RateFitWindow& window) {
  const std::size_t n = std::min(t.size(), value.size());
  double lower = window.lower;
  if (window.floor_factor > 0.0 && n > 0) {
    const auto tail = static_cast<std::size_t>(window.floor_tail_fraction * static_cast<double>(n));
    double floor = 0.0;
    for (std::size_t i = n - std::max<std::size_t>(tail, 1); i < n; ++i) floor = std::max(floor, value[i]);
    lower = std::max(lower, window.floor_factor * floor);
  }
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = value[i];
    if (t[i] < window.t_start || !(v > lower && v < window.upper)) continue;
    ts.push_back(t[i]);
    ys.push_back(std::log(v));
  }
  if (ts.size() < 10) return std::nullopt;
  const double m = static_cast<double>(ts.size());
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    t_mean += ts[i];
    y_mean += ys[i];
  }
  t_mean /= m;
  y_mean /= m;
  double s_tt = 0.0, s_ty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    s_tt += (ts[i] - t_mean) * (ts[i] - t_mean);
    s_ty += (ts[i] - t_mean) * (ys[i] - y_mean);
  }
  if (!(s_tt > 0.0)) return std::nullopt;
  return -s_ty / s_tt;
}

}  // namespace quatslide
