#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "quatslide/quat.hpp"
#include "quatslide/types.hpp"

namespace quatslide {

/// Convergence rates: lambda for orientation, sigma for position (1/s).
struct Gains {
  double lambda = 2.0;
  double sigma = 2.0;

  /// Throws DomainError unless both are finite and strictly positive.
  void validate() const;
};

struct OrientationError {
  UnitQuaternion q_e;
  RotMat3 R_e;
  Vec3 omega_e;
};

struct PositionError {
  Vec3 p_e;
  Vec3 v_e;
};

/// s_p stacked over the quaternion sliding variable. `frame` tells whether
/// s_q is the local-frame variable or the inertial-frame one.
struct SlidingVariables {
  Vec3 s_p = Vec3::Zero();
  Vec3 s_q = Vec3::Zero();
  Frame frame = Frame::Local;

  Vector6d stacked() const {
    Vector6d s;
    s << s_p, s_q;
    return s;
  }
};

/// q_e = q_d* (x) q.
UnitQuaternion error_quaternion(const UnitQuaternion& q_d, const UnitQuaternion& q);

/// omega - R_e^T omega_d, both velocities in their own body frames.
Vec3 omega_error_local(const Vec3& omega, const Vec3& omega_d, const RotMat3& R_e);

/// omega_e + 2 lambda sgn(q_e°) vec(q_e).
Vec3 s_q_local(const UnitQuaternion& q_e, const Vec3& omega_e, double lambda);

/// Inertial-frame variant; omega_e = omega - omega_d with both in the
/// inertial frame.
Vec3 s_q_global(const UnitQuaternion& q_e, const Vec3& omega_e, const RotMat3& R_d, double lambda);

Vec3 s_p(const Vec3& p_e, const Vec3& v_e, double sigma);

/// Lyapunov quantity ||vec(q_e)||^2.
inline double qvec_squared_norm(const UnitQuaternion& q_e) { return q_e.vec().squaredNorm(); }

struct FlowSample {
  double t;
  UnitQuaternion q_e;
};

/// Integrates q_e' = 1/2 q_e (x) (0, omega_e) with omega_e pinned to the
/// manifold s_q = 0, i.e. omega_e = -2 lambda sgn(q_e°) vec(q_e). RK4 with
/// renormalization after each step. Returns round(T/dt) + 1 samples starting
/// at t = 0. Throws DomainError on bad arguments and NumericalDivergence on
/// non-finite state.
std::vector<FlowSample> qe_flow_on_manifold(const UnitQuaternion& q_e0, double lambda, double dt,
                                            double T);

/// Desired attitude sample for attitude_flow_on_manifold. omega_d is in the
/// desired body frame.
struct AttitudeReference {
  UnitQuaternion q_d;
  Vec3 omega_d_local;
};

/// Integrates the actual attitude q (not q_e) against a moving reference,
/// with the angular velocity chosen so the frame's sliding variable stays
/// zero:
///   Local:  q' = 1/2 q (x) (0, omega),  omega = R_e^T omega_d - 2 lambda sgn vec(q_e)
///   Global: q' = 1/2 (0, w) (x) q,      w = R_d omega_d - 2 lambda sgn R_d vec(q_e)
/// Samples returned carry q_e = q_d(t)* (x) q(t).
std::vector<FlowSample> attitude_flow_on_manifold(
    Frame frame, const UnitQuaternion& q0,
    const std::function<AttitudeReference(double)>& reference, double lambda, double dt, double T);

/// Closed-form solution of x' = -sigma x sqrt(1 - x), x(0) = x0:
///   x(t) = 4 c e^{-sigma t} / (1 + c e^{-sigma t})^2,
///   c = (1 - sqrt(1 - x0)) / (1 + sqrt(1 - x0)).
/// Throws DomainError unless 0 <= x0 < 1, sigma > 0, t >= 0.
double lemma1_solution(double x0, double sigma, double t);

/// Window for exponential-rate fits.
struct RateFitWindow {
  double lower = 1e-6;
  double upper = 0.5;
  double t_start = 0.0;
  /// When > 0 the lower bound is raised to floor_factor times the largest
  /// value over the final floor_tail_fraction of the samples, keeping a
  /// steady tracking floor out of the fit.
  double floor_factor = 0.0;
  double floor_tail_fraction = 0.2;
};

/// Least-squares slope of log(value) against t over samples with
/// lower < value < upper and t >= t_start, returned as a positive decay rate.
/// nullopt when fewer than 10 samples fall in the window.
std::optional<double> fit_exponential_rate(std::span<const double> t, std::span<const double> value,
                                           const RateFitWindow& window = {});

}  // namespace quatslide
