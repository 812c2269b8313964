#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sensopt/pde.hpp"
#include "sensopt/reconstruct.hpp"
#include "sensopt/sensor_weights.hpp"

namespace sensopt {

/// Weights of the placement cost J(omega) = alpha * sum(omega)
///   + sum_{k=0}^{K-1} sum_i [f_n(f_r(z_k, omega)) - z_{k+1}]_i^2 h_i dt.
struct CostParams {
  double alpha = 1.0;
  double dt = 0.1;
  Eigen::VectorXd quad;  // trapezoidal weights h_i from the grid

  void validate() const {
    if (alpha < 0) throw std::invalid_argument("cost: alpha must be >= 0");
    if (dt <= 0) throw std::invalid_argument("cost: dt must be positive");
    if ((quad.array() <= 0).any()) throw std::invalid_argument("cost: quad weights must be positive");
  }
};

struct CostReport {
  double total = 0;        // sensor_term + error_term, computed as that exact sum
  double sensor_term = 0;  // alpha * sum(omega)
  double error_term = 0;
  std::vector<double> per_step_error;  // length K; entry k = dt * sum_i r_{k,i}^2 h_i
};

/// Evaluate J by reconstruct-then-predict per step. The model type needs
/// predict(model, x); anything affine with the grid's state length works,
/// including SimulatorMap for perfect-predictor baselines.
template <class Model>
CostReport evaluate_cost(const Trajectory& traj, const SensorWeights& w, const Model& model,
                         const ReconstructionSpec& spec, const CostParams& p) {
  p.validate();
  const int c = traj.grid.c();
  if (w.c() != c || p.quad.size() != c)
    throw std::invalid_argument("evaluate_cost: grid mismatch");

  CostReport rep;
  rep.sensor_term = p.alpha * w.omega.sum();
  rep.per_step_error.reserve(traj.K());
  for (int k = 0; k < traj.K(); ++k) {
    const Eigen::VectorXd ur = reconstruct(traj.snapshots[k], w, traj.grid, spec);
    const Eigen::VectorXd r = predict(model, ur) - traj.snapshots[k + 1];
    const double ek = p.dt * (r.array().square() * p.quad.array()).sum();
    rep.per_step_error.push_back(ek);
    rep.error_term += ek;
  }
  rep.total = rep.sensor_term + rep.error_term;
  return rep;
}

/// Approximate gradient g_i = alpha + 2 sum_k dt [M^T (h ⊙ r_k)]_i with
/// M the predictor's input Jacobian. The reconstruction Jacobian in omega is
/// dropped: f_r is piecewise constant between threshold crossings, so its
/// derivative is zero almost everywhere and carries no search direction.
/// The alpha offset is added in a single final pass, so the gradients at two
/// alpha values differ by exactly alpha per component whenever that sum is
/// representable.
template <class Model>
Eigen::VectorXd approximate_gradient(const Trajectory& traj, const SensorWeights& w,
                                     const Model& model, const ReconstructionSpec& spec,
                                     const CostParams& p) {
  p.validate();
  const int c = traj.grid.c();
  if (w.c() != c || p.quad.size() != c)
    throw std::invalid_argument("approximate_gradient: grid mismatch");

  const auto jac = input_jacobian(model);  // constant for affine predictors
  Eigen::VectorXd g = Eigen::VectorXd::Zero(c);
  for (int k = 0; k < traj.K(); ++k) {
    const Eigen::VectorXd ur = reconstruct(traj.snapshots[k], w, traj.grid, spec);
    const Eigen::VectorXd r = predict(model, ur) - traj.snapshots[k + 1];
    g += 2 * p.dt * jac.applyT(p.quad.cwiseProduct(r));
  }
  g.array() += p.alpha;
  return g;
}

/// Consistency check of the gradient plumbing against central finite
/// differences of the frozen-reconstruction surrogate
///   J~(v) = sum_k sum_i [f_n(x_k + (v - omega)) - z_{k+1}]_i^2 h_i dt,
/// x_k = f_r(z_k, omega) held fixed. grad J~(omega) equals the error part of
/// approximate_gradient, and J~ is quadratic, so central differences agree to
/// roundoff. This validates the Jacobian transpose products, not dJ/domega
/// itself, which is flat almost everywhere in omega.
template <class Model>
double surrogate_fd_check(const Trajectory& traj, const SensorWeights& w, const Model& model,
                          const ReconstructionSpec& spec, const CostParams& p, double step) {
  p.validate();
  if (step <= 0) throw std::invalid_argument("surrogate_fd_check: step must be positive");
  for (int i = 0; i < w.c(); ++i)
    if (std::abs(w.omega(i) - 0.5) <= step)
      throw std::invalid_argument(
          "surrogate_fd_check: omega entry within step of the 0.5 threshold");

  const int c = traj.grid.c();
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(traj.K());
  for (int k = 0; k < traj.K(); ++k)
    xs.push_back(reconstruct(traj.snapshots[k], w, traj.grid, spec));

  auto surrogate = [&](const Eigen::VectorXd& delta) {
    double acc = 0.0;
    for (int k = 0; k < traj.K(); ++k) {
      const Eigen::VectorXd r = predict(model, xs[k] + delta) - traj.snapshots[k + 1];
      acc += p.dt * (r.array().square() * p.quad.array()).sum();
    }
    return acc;
  };

  const auto jac = input_jacobian(model);
  Eigen::VectorXd ge = Eigen::VectorXd::Zero(c);
  for (int k = 0; k < traj.K(); ++k) {
    const Eigen::VectorXd r = predict(model, xs[k]) - traj.snapshots[k + 1];
    ge += 2 * p.dt * jac.applyT(p.quad.cwiseProduct(r));
  }

  double worst = 0.0;
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(c);
  for (int i = 0; i < c; ++i) {
    delta(i) = step;
    const double fplus = surrogate(delta);
    delta(i) = -step;
    const double fminus = surrogate(delta);
    delta(i) = 0.0;
    worst = std::max(worst, std::abs((fplus - fminus) / (2 * step) - ge(i)));
  }
  return worst;
}

}  // namespace sensopt
