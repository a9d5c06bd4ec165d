#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "hri/types.hpp"

namespace hri {

/// Unicycle kinematics: returns [v cos(theta), v sin(theta), w].
inline Eigen::Vector3d unicycle_derivative(const RobotState& state, const RobotControl& control) {
  if (!state.finite() || !control.finite()) {
    throw std::invalid_argument("unicycle_derivative: non-finite input");
  }
  return {control.v * std::cos(state.theta), control.v * std::sin(state.theta), control.w};
}

/// Affine change of coordinates x = A z + b between the operator frame and
/// the robot frame. A 2x2 linear part acts on positions only and leaves the
/// heading untouched.
class AffineDiffeomorphism {
 public:
  static constexpr double kSingularTol = 1e-9;

  AffineDiffeomorphism() : linear_(Eigen::Matrix3d::Identity()), offset_(Eigen::Vector3d::Zero()) {
    check_invertible();
  }

  AffineDiffeomorphism(const Eigen::Matrix3d& linear, const Eigen::Vector3d& offset)
      : linear_(linear), offset_(offset) {
    check_invertible();
  }

  AffineDiffeomorphism(const Eigen::Matrix2d& positional, const Eigen::Vector2d& offset)
      : linear_(Eigen::Matrix3d::Identity()), offset_(Eigen::Vector3d::Zero()) {
    linear_.topLeftCorner<2, 2>() = positional;
    offset_.head<2>() = offset;
    check_invertible();
  }

  static AffineDiffeomorphism identity() { return AffineDiffeomorphism(); }

  const Eigen::Matrix3d& linear_part() const { return linear_; }
  const Eigen::Vector3d& offset() const { return offset_; }

  Eigen::Vector3d forward(const Eigen::Vector3d& z) const { return linear_ * z + offset_; }

  bool is_identity() const {
    return linear_.isIdentity(0.0) && offset_.isZero(0.0);
  }

 private:
  void check_invertible() const {
    if (std::abs(linear_.determinant()) <= kSingularTol) {
      throw SingularMapError("AffineDiffeomorphism: linear part is singular");
    }
  }

  Eigen::Matrix3d linear_;
  Eigen::Vector3d offset_;
};

/// Derivative of the operator-frame state z under the pulled-back dynamics
/// zdot = [D psi]^-1 f(psi(z), u). For an affine psi the Jacobian is its
/// constant linear part; the identity map short-circuits to the plain
/// unicycle derivative so both paths agree bit for bit.
inline Eigen::Vector3d pullback_derivative(const AffineDiffeomorphism& psi,
                                           const Eigen::Vector3d& operator_state,
                                           const RobotControl& control) {
  const Eigen::Vector3d x = psi.forward(operator_state);
  const Eigen::Vector3d f = unicycle_derivative(RobotState(x[0], x[1], x[2]), control);
  if (psi.is_identity()) {
    return f;
  }
  return psi.linear_part().partialPivLu().solve(f);
}

namespace detail {

/// One classic RK4 step with the control held constant over the step.
inline RobotState rk4_step(const RobotState& s, const RobotControl& u, double h) {
  const Eigen::Vector3d y(s.x, s.y, s.theta);
  const auto f = [&u](const Eigen::Vector3d& p) {
    return Eigen::Vector3d(u.v * std::cos(p[2]), u.v * std::sin(p[2]), u.w);
  };
  const Eigen::Vector3d k1 = f(y);
  const Eigen::Vector3d k2 = f(y + 0.5 * h * k1);
  const Eigen::Vector3d k3 = f(y + 0.5 * h * k2);
  const Eigen::Vector3d k4 = f(y + h * k3);
  const Eigen::Vector3d next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return RobotState(next[0], next[1], next[2]);  // re-wraps theta
}

inline std::size_t step_count(double duration, double dt) {
  if (duration == 0.0) return 0;
  // Guard against ceil(20.000000000004) = 21 for exact divisors.
  return static_cast<std::size_t>(std::ceil(duration / dt - 1e-12));
}

}  // namespace detail

/// Fixed-step RK4 rollout of a piecewise-constant control signal.
///
/// `control_at(t)` is sampled once per step at the interval's left endpoint
/// and held constant over the step. The grid is uniform with
/// ceil(duration/dt) steps; the actual step never exceeds dt.
template <typename ControlFn>
Trajectory integrate(const RobotState& state0, ControlFn&& control_at, double duration, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  if (duration < 0.0) throw std::invalid_argument("integrate: duration must be >= 0");
  if (!state0.finite()) throw std::invalid_argument("integrate: non-finite initial state");

  const std::size_t n = detail::step_count(duration, dt);
  const double h = (n == 0) ? dt : duration / static_cast<double>(n);

  Trajectory traj;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  traj.controls.reserve(n);
  traj.actions.reserve(n);

  RobotState s = state0;
  traj.times.push_back(0.0);
  traj.states.push_back(s);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * h;
    const RobotControl u = control_at(t);
    if (!u.finite()) throw std::invalid_argument("integrate: non-finite control sample");
    s = detail::rk4_step(s, u, h);
    traj.times.push_back(static_cast<double>(i + 1) * h);
    traj.states.push_back(s);
    traj.controls.push_back(u);
    traj.actions.emplace_back(0.0, 0.0);
  }
  return traj;
}

/// Convenience overload for a constant control.
inline Trajectory integrate(const RobotState& state0, const RobotControl& u, double duration, double dt) {
  return integrate(
      state0, [&u](double) { return u; }, duration, dt);
}

}  // namespace hri
