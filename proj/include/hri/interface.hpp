#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "hri/dynamics.hpp"
#include "hri/types.hpp"

namespace hri {

/// Result of pushing an operator action through the interface. `clamped` is
/// set when any raw component had to be saturated into the robot box.
struct InterfaceOutput {
  RobotControl control;
  bool clamped{false};
};

/// Linear operator-to-robot interface u = G a, with outputs saturated into
/// the robot's action box. Ordering convention: a = [head, body]^T maps to
/// u = [v, w]^T, which makes the intuitive map anti-diagonal.
struct LinearInterfaceMap {
  Eigen::Matrix2d G{Eigen::Matrix2d::Identity()};
  ActionSpace robot_bounds{ActionSpace::robot_planar(-3.0, 3.0, -2.0, 2.0)};

  LinearInterfaceMap() = default;
  LinearInterfaceMap(const Eigen::Matrix2d& g, ActionSpace bounds)
      : G(g), robot_bounds(std::move(bounds)) {
    if (!G.allFinite()) throw std::invalid_argument("LinearInterfaceMap: G must be finite");
    if (robot_bounds.size() != 2) {
      throw std::invalid_argument("LinearInterfaceMap: robot_bounds must have 2 axes");
    }
  }
};

/// Raw (unsaturated) image of an action under the map.
inline RobotControl apply_interface_raw(const LinearInterfaceMap& map, const OperatorAction& a) {
  const Eigen::Vector2d u = map.G * Eigen::Vector2d(a.head, a.body);
  return {u[0], u[1]};
}

inline InterfaceOutput apply_interface(const LinearInterfaceMap& map, const OperatorAction& a) {
  const RobotControl raw = apply_interface_raw(map, a);
  const double v = std::min(std::max(raw.v, map.robot_bounds.axis(0).lower), map.robot_bounds.axis(0).upper);
  const double w = std::min(std::max(raw.w, map.robot_bounds.axis(1).lower), map.robot_bounds.axis(1).upper);
  return {{v, w}, v != raw.v || w != raw.w};
}

/// Frobenius distance from G to the nearest orthogonal matrix, ||U V^T - G||_F
/// with G = U S V^T; equals the l2 norm of the singular values minus one.
inline double orthogonality_distance(const Eigen::Matrix2d& G) {
  if (!G.allFinite()) throw std::invalid_argument("orthogonality_distance: G must be finite");
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix2d nearest = svd.matrixU() * svd.matrixV().transpose();
  return (nearest - G).norm();
}

/// Rolls out piecewise-constant operator action knots through the interface:
/// the knot grid divides [0, duration] evenly; each sampled action is clamped
/// into `operator_bounds` when given, mapped by `map`, saturated into the
/// robot box, and integrated with RK4 at step dt. Records both the action and
/// the saturated control per integration interval.
inline Trajectory rollout(const LinearInterfaceMap& map, const std::vector<OperatorAction>& knots,
                          const RobotState& state0, double duration, double dt,
                          const ActionSpace* operator_bounds = nullptr) {
  if (knots.empty()) throw std::invalid_argument("rollout: need at least one action knot");
  const double knot_dt = duration / static_cast<double>(knots.size());
  const auto action_at = [&](double t) {
    std::size_t k = (knot_dt > 0.0) ? static_cast<std::size_t>(t / knot_dt) : 0;
    if (k >= knots.size()) k = knots.size() - 1;
    OperatorAction a = knots[k];
    if (operator_bounds != nullptr) {
      a.head = std::min(std::max(a.head, operator_bounds->axis(0).lower), operator_bounds->axis(0).upper);
      a.body = std::min(std::max(a.body, operator_bounds->axis(1).lower), operator_bounds->axis(1).upper);
    }
    return a;
  };

  Trajectory traj = integrate(
      state0, [&](double t) { return apply_interface(map, action_at(t)).control; }, duration, dt);
  for (std::size_t i = 0; i < traj.actions.size(); ++i) {
    traj.actions[i] = action_at(traj.times[i]);
  }
  return traj;
}

}  // namespace hri
