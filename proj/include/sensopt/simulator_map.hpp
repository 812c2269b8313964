#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "sensopt/pde.hpp"

namespace sensopt {

/// Adapter exposing the simulator's own one-step map through the predictor
/// interface (predict / input_jacobian), for perfect-predictor baselines and
/// the all-sensors lower bound J = alpha * c. Heat kinds only: the wave step
/// is second order in time and has no single-snapshot map.
struct SimulatorMap {
  PdeModel model;
  Grid grid;
  double dt = 0.1;

  SimulatorMap(PdeModel m, Grid g, double dt_) : model(m), grid(std::move(g)), dt(dt_) {
    if (model.kind == PdeKind::Wave1D)
      throw std::invalid_argument("SimulatorMap: wave has no single-snapshot step");
  }

  Eigen::VectorXd step(const Eigen::VectorXd& z) const {
    if (model.kind == PdeKind::Heat1D)
      return heat1d_step(z, model.coefficient * dt / (grid.h[0] * grid.h[0]));
    return heat2d_step(z, grid, model.coefficient * dt / (grid.h[0] * grid.h[0]),
                       model.coefficient * dt / (grid.h[1] * grid.h[1]));
  }
};

class SimulatorJacobian {
 public:
  explicit SimulatorJacobian(const SimulatorMap& s) : M_(s.grid.c(), s.grid.c()) {
    // The step is linear, so columns are the images of the unit vectors.
    Eigen::VectorXd e = Eigen::VectorXd::Zero(s.grid.c());
    for (int j = 0; j < s.grid.c(); ++j) {
      e(j) = 1.0;
      M_.col(j) = s.step(e);
      e(j) = 0.0;
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return M_ * v; }
  Eigen::VectorXd applyT(const Eigen::VectorXd& v) const { return M_.transpose() * v; }
  const Eigen::MatrixXd& dense() const { return M_; }

 private:
  Eigen::MatrixXd M_;
};

inline Eigen::VectorXd predict(const SimulatorMap& s, const Eigen::VectorXd& x) {
  return s.step(x);
}

inline SimulatorJacobian input_jacobian(const SimulatorMap& s) { return SimulatorJacobian(s); }

}  // namespace sensopt
