#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace hri {

struct NelderMeadOptions {
  std::size_t max_evaluations{20000};
  /// Relative f-spread below which the current simplex counts as converged.
  double f_tolerance{1e-10};
  /// Scale applied to the initial steps when the simplex is rebuilt around
  /// the incumbent after a converged stage (oriented restart).
  double restart_shrink{0.3};
};

struct NelderMeadResult {
  Eigen::VectorXd best_point;
  double best_value{std::numeric_limits<double>::infinity()};
  std::size_t evaluations{0};
  std::size_t stages{0};
  /// Best value seen so far, recorded once per iteration; non-increasing.
  std::vector<double> best_history;
};

/// Derivative-free simplex minimizer with the dimension-adaptive
/// reflection/expansion/contraction/shrink coefficients of Gao & Han and
/// oriented restarts: once a stage's simplex collapses, a fresh simplex is
/// rebuilt around the incumbent with shrunken steps until the evaluation
/// budget runs out. Deterministic for a fixed start.
template <typename F>
NelderMeadResult nelder_mead(F&& objective, const Eigen::VectorXd& start,
                             const Eigen::VectorXd& initial_steps, const NelderMeadOptions& opt = {}) {
  const auto n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");
  if (initial_steps.size() != n) throw std::invalid_argument("nelder_mead: steps/start size mismatch");

  NelderMeadResult result;
  result.best_point = start;

  const auto eval = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    const double f = objective(x);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };

  // Adaptive coefficients (Gao & Han 2012).
  const double nd = static_cast<double>(n);
  const double rho = 1.0;
  const double chi = 1.0 + 2.0 / nd;
  const double gamma = 0.75 - 1.0 / (2.0 * nd);
  const double sigma = 1.0 - 1.0 / nd;

  if (result.evaluations >= opt.max_evaluations) return result;
  result.best_value = eval(start);
  result.best_history.push_back(result.best_value);

  Eigen::VectorXd steps = initial_steps;
  std::vector<Eigen::VectorXd> verts;
  std::vector<double> fvals;
  std::vector<std::size_t> order(static_cast<std::size_t>(n) + 1);

  const auto note_best = [&](const Eigen::VectorXd& x, double f) {
    if (f < result.best_value) {
      result.best_value = f;
      result.best_point = x;
    }
  };

  while (result.evaluations < opt.max_evaluations) {
    ++result.stages;
    // Fresh axis-aligned simplex around the incumbent.
    verts.assign(1, result.best_point);
    fvals.assign(1, result.best_value);
    for (Eigen::Index i = 0; i < n && result.evaluations < opt.max_evaluations; ++i) {
      Eigen::VectorXd v = result.best_point;
      v[i] += steps[i];
      const double f = eval(v);
      note_best(v, f);
      verts.push_back(std::move(v));
      fvals.push_back(f);
    }
    if (verts.size() < static_cast<std::size_t>(n) + 1) break;  // budget died mid-simplex

    bool converged = false;
    while (!converged && result.evaluations < opt.max_evaluations) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t second_worst = order[order.size() - 2];

      if (fvals[worst] - fvals[best] <= opt.f_tolerance * (std::abs(fvals[best]) + opt.f_tolerance)) {
        converged = true;
        break;
      }

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (std::size_t k = 0; k < order.size(); ++k) {
        if (k != worst) centroid += verts[k];
      }
      centroid /= nd;

      const Eigen::VectorXd reflected = centroid + rho * (centroid - verts[worst]);
      const double f_reflected = eval(reflected);
      note_best(reflected, f_reflected);

      if (f_reflected < fvals[best]) {
        if (result.evaluations < opt.max_evaluations) {
          const Eigen::VectorXd expanded = centroid + chi * (reflected - centroid);
          const double f_expanded = eval(expanded);
          note_best(expanded, f_expanded);
          if (f_expanded < f_reflected) {
            verts[worst] = expanded;
            fvals[worst] = f_expanded;
          } else {
            verts[worst] = reflected;
            fvals[worst] = f_reflected;
          }
        } else {
          verts[worst] = reflected;
          fvals[worst] = f_reflected;
        }
      } else if (f_reflected < fvals[second_worst]) {
        verts[worst] = reflected;
        fvals[worst] = f_reflected;
      } else {
        const bool outside = f_reflected < fvals[worst];
        const Eigen::VectorXd contracted =
            outside ? centroid + gamma * (reflected - centroid) : centroid - gamma * (centroid - verts[worst]);
        const double f_contracted =
            (result.evaluations < opt.max_evaluations) ? eval(contracted)
                                                       : std::numeric_limits<double>::infinity();
        note_best(contracted, f_contracted);
        if (f_contracted < std::min(f_reflected, fvals[worst])) {
          verts[worst] = contracted;
          fvals[worst] = f_contracted;
        } else {
          // Shrink toward the best vertex.
          for (std::size_t k = 0; k < order.size() && result.evaluations < opt.max_evaluations; ++k) {
            if (k == best) continue;
            verts[k] = verts[best] + sigma * (verts[k] - verts[best]);
            fvals[k] = eval(verts[k]);
            note_best(verts[k], fvals[k]);
          }
        }
      }
      result.best_history.push_back(result.best_value);
    }

    steps *= opt.restart_shrink;
  }

  return result;
}

}  // namespace hri
