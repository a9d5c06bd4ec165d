#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hri {

/// Wraps an angle to the half-open interval (-pi, pi].
inline double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) {
    w = std::numbers::pi;
  }
  return w;
}

/// Shortest signed angular difference a - b, wrapped to (-pi, pi].
inline double angle_difference(double a, double b) { return wrap_angle(a - b); }

inline bool all_finite(std::initializer_list<double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

/// Planar pose of the vehicle: position in meters, heading in radians.
/// The heading is stored wrapped to (-pi, pi].
struct RobotState {
  double x{0.0};
  double y{0.0};
  double theta{0.0};

  RobotState() = default;
  RobotState(double x_, double y_, double theta_) : x(x_), y(y_), theta(wrap_angle(theta_)) {}

  bool finite() const { return all_finite({x, y, theta}); }
};

/// Control applied to the vehicle: forward speed v [m/s], turn rate w [rad/s].
struct RobotControl {
  double v{0.0};
  double w{0.0};

  RobotControl() = default;
  RobotControl(double v_, double w_) : v(v_), w(w_) {}

  bool finite() const { return all_finite({v, w}); }
};

/// Command issued by the operator: head yaw rate [rad/s] and body
/// forward-motion speed [m/s].
struct OperatorAction {
  double head{0.0};
  double body{0.0};

  OperatorAction() = default;
  OperatorAction(double head_, double body_) : head(head_), body(body_) {}

  bool finite() const { return all_finite({head, body}); }
};

/// One labelled axis of an action box.
struct ActionAxis {
  std::string name;
  std::string unit;
  double lower{0.0};
  double upper{0.0};
};

/// Axis-aligned box of admissible action vectors with per-axis unit labels.
/// Supports any number of axes; the planar problems use two.
class ActionSpace {
 public:
  ActionSpace() = default;

  explicit ActionSpace(std::vector<ActionAxis> axes) : axes_(std::move(axes)) {
    for (const ActionAxis& ax : axes_) {
      if (!std::isfinite(ax.lower) || !std::isfinite(ax.upper)) {
        throw std::invalid_argument("ActionSpace: bounds must be finite on axis '" + ax.name + "'");
      }
      if (!(ax.lower < ax.upper)) {
        throw std::invalid_argument("ActionSpace: lower must be < upper on axis '" + ax.name + "'");
      }
    }
  }

  /// Two-axis operator box: head yaw rate [rad/s], body speed [m/s].
  static ActionSpace operator_planar(double head_lo, double head_hi, double body_lo, double body_hi) {
    return ActionSpace({{"head", "rad/s", head_lo, head_hi}, {"body", "m/s", body_lo, body_hi}});
  }

  /// Two-axis robot box: forward speed v [m/s], angular speed w [rad/s].
  static ActionSpace robot_planar(double v_lo, double v_hi, double w_lo, double w_hi) {
    return ActionSpace({{"v", "m/s", v_lo, v_hi}, {"w", "rad/s", w_lo, w_hi}});
  }

  /// Full four-axis operator box: head yaw, camera tilt, body speed, depth.
  /// The tilt and depth axes ride along for bookkeeping only; the planar
  /// optimization uses the two-axis boxes above.
  static ActionSpace operator_full(double yaw_lo, double yaw_hi, double tilt_lo, double tilt_hi,
                                   double body_lo, double body_hi, double z_lo, double z_hi) {
    return ActionSpace({{"head", "rad/s", yaw_lo, yaw_hi},
                        {"tilt", "rad/s", tilt_lo, tilt_hi},
                        {"body", "m/s", body_lo, body_hi},
                        {"z", "m", z_lo, z_hi}});
  }

  std::size_t size() const { return axes_.size(); }
  const ActionAxis& axis(std::size_t i) const { return axes_.at(i); }
  const std::vector<ActionAxis>& axes() const { return axes_; }

  bool contains(const Eigen::VectorXd& a, double tol = 0.0) const {
    if (static_cast<std::size_t>(a.size()) != axes_.size()) return false;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      if (a[static_cast<Eigen::Index>(i)] < axes_[i].lower - tol ||
          a[static_cast<Eigen::Index>(i)] > axes_[i].upper + tol) {
        return false;
      }
    }
    return true;
  }

  Eigen::VectorXd clamp(const Eigen::VectorXd& a) const {
    if (static_cast<std::size_t>(a.size()) != axes_.size()) {
      throw std::invalid_argument("ActionSpace::clamp: dimension mismatch");
    }
    Eigen::VectorXd out = a;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      out[k] = std::min(std::max(out[k], axes_[i].lower), axes_[i].upper);
    }
    return out;
  }

  double span(std::size_t i) const { return axes_.at(i).upper - axes_.at(i).lower; }

 private:
  std::vector<ActionAxis> axes_;
};

/// Time-sampled rollout: states on a uniform grid, with the control and
/// operator-action samples that produced each interval.
///
/// states.size() == times.size(); controls.size() == actions.size() == times.size() - 1.
struct Trajectory {
  std::vector<double> times;
  std::vector<RobotState> states;
  std::vector<RobotControl> controls;
  std::vector<OperatorAction> actions;

  std::size_t samples() const { return states.size(); }

  double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }

  /// Grid step; requires at least two samples.
  double dt() const {
    if (times.size() < 2) throw std::invalid_argument("Trajectory::dt: need at least 2 samples");
    return times[1] - times[0];
  }

  bool uniform_grid(double tol = 1e-9) const {
    if (times.size() < 2) return true;
    const double h = times[1] - times[0];
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
      if (std::abs((times[i + 1] - times[i]) - h) > tol) return false;
    }
    return true;
  }

  void validate() const {
    if (states.size() != times.size()) {
      throw std::invalid_argument("Trajectory: states/times length mismatch");
    }
    if (!times.empty() && (controls.size() != times.size() - 1 || actions.size() != times.size() - 1)) {
      throw std::invalid_argument("Trajectory: interval arrays must have times.size()-1 entries");
    }
  }
};

/// Error for maps whose linear part is (numerically) singular.
class SingularMapError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace hri
