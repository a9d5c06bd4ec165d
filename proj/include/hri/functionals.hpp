#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hri/interface.hpp"
#include "hri/types.hpp"

namespace hri {

/// Weights of the trajectory cost: terminal (alpha), operator effort (beta,
/// with metric M), path length (gamma) and interface orthogonality (delta).
/// M weighs head movements against body movements.
struct CostWeights {
  double alpha{1.0};
  double beta{0.0};
  double gamma{0.0};
  double delta{0.0};
  Eigen::Matrix2d M{Eigen::Matrix2d::Identity()};

  void validate() const {
    if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0 && delta >= 0.0)) {
      throw std::invalid_argument("CostWeights: alpha, beta, gamma, delta must be >= 0");
    }
    check_spd(M);
  }

  static void check_spd(const Eigen::Matrix2d& M) {
    if (!M.allFinite() || std::abs(M(0, 1) - M(1, 0)) > 1e-12) {
      throw std::invalid_argument("effort metric M must be finite and symmetric");
    }
    // Symmetric 2x2 is SPD iff trace > 0 and det > 0.
    if (!(M.trace() > 0.0 && M.determinant() > 0.0)) {
      throw std::invalid_argument("effort metric M must be positive definite");
    }
  }
};

/// Squared distance between the rollout's final state and the target,
/// with the heading difference wrapped to (-pi, pi]. Unweighted.
inline double terminal_cost(const Trajectory& traj, const RobotState& x_final) {
  if (traj.states.empty()) throw std::invalid_argument("terminal_cost: empty trajectory");
  const RobotState& last = traj.states.back();
  const double dx = x_final.x - last.x;
  const double dy = x_final.y - last.y;
  const double dth = angle_difference(x_final.theta, last.theta);
  return dx * dx + dy * dy + dth * dth;
}

/// Left-endpoint quadrature of the operator effort integral a^T M a dt.
inline double effort_cost(const Trajectory& traj, const Eigen::Matrix2d& M) {
  if (traj.states.empty()) throw std::invalid_argument("effort_cost: empty trajectory");
  CostWeights::check_spd(M);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
    const Eigen::Vector2d a(traj.actions[i].head, traj.actions[i].body);
    total += a.dot(M * a) * (traj.times[i + 1] - traj.times[i]);
  }
  return total;
}

/// Path length of the sampled state trace: sum over intervals of
/// ||(dx, dy, wrapped dtheta)||. With positions_only the heading component
/// is dropped; the default is the literal full-state norm, which mixes m and
/// rad in one magnitude.
inline double arc_length(const Trajectory& traj, bool positions_only = false) {
  if (traj.states.size() < 2) throw std::invalid_argument("arc_length: need at least 2 samples");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
    const RobotState& a = traj.states[i];
    const RobotState& b = traj.states[i + 1];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double dth = positions_only ? 0.0 : angle_difference(b.theta, a.theta);
    total += std::sqrt(dx * dx + dy * dy + dth * dth);
  }
  return total;
}

/// Average curvature ||xddot|| of the sampled trace, estimated with central
/// second differences on a uniform grid (heading unwrapped first) and
/// averaged over the interior samples.
inline double mean_curvature(const Trajectory& traj) {
  if (traj.states.size() < 3) throw std::invalid_argument("mean_curvature: need at least 3 samples");
  if (!traj.uniform_grid()) throw std::invalid_argument("mean_curvature: non-uniform time grid");
  const double h = traj.times[1] - traj.times[0];

  std::vector<double> theta(traj.states.size());
  theta[0] = traj.states[0].theta;
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    theta[i] = theta[i - 1] + angle_difference(traj.states[i].theta, traj.states[i - 1].theta);
  }

  double sum = 0.0;
  const std::size_t interior = traj.states.size() - 2;
  for (std::size_t i = 1; i + 1 < traj.states.size(); ++i) {
    const double ax = (traj.states[i + 1].x - 2.0 * traj.states[i].x + traj.states[i - 1].x) / (h * h);
    const double ay = (traj.states[i + 1].y - 2.0 * traj.states[i].y + traj.states[i - 1].y) / (h * h);
    const double at = (theta[i + 1] - 2.0 * theta[i] + theta[i - 1]) / (h * h);
    sum += std::sqrt(ax * ax + ay * ay + at * at);
  }
  return sum / static_cast<double>(interior);
}

/// Per-term decomposition of the trajectory cost. `raw` terms carry no
/// weights; `weighted` terms are the products that sum to `total`.
struct CostBreakdown {
  double terminal{0.0};
  double effort{0.0};
  double path_length{0.0};
  double orthogonality{0.0};

  double weighted_terminal{0.0};
  double weighted_effort{0.0};
  double weighted_path_length{0.0};
  double weighted_orthogonality{0.0};

  double total{0.0};
};

/// Full trajectory cost
///   alpha*||x_final - x(T)||^2 + beta*int a^T M a dt
///   + gamma*int ||xdot|| dt + delta*dist(G, O(2)).
inline CostBreakdown total_cost(const Trajectory& traj, const RobotState& x_final,
                                const Eigen::Matrix2d& G, const CostWeights& weights) {
  weights.validate();
  CostBreakdown b;
  b.terminal = terminal_cost(traj, x_final);
  b.effort = effort_cost(traj, weights.M);
  b.path_length = (traj.states.size() >= 2) ? arc_length(traj) : 0.0;
  b.orthogonality = orthogonality_distance(G);
  b.weighted_terminal = weights.alpha * b.terminal;
  b.weighted_effort = weights.beta * b.effort;
  b.weighted_path_length = weights.gamma * b.path_length;
  b.weighted_orthogonality = weights.delta * b.orthogonality;
  b.total = b.weighted_terminal + b.weighted_effort + b.weighted_path_length + b.weighted_orthogonality;
  return b;
}

}  // namespace hri
