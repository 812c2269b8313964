// Minimal end-to-end use of the library on a small heat problem: simulate,
// train the one-step predictor, optimize sensor placement, print the result.

#include <cstdio>

#include "sensopt/sensopt.hpp"

int main() {
  using namespace sensopt;

  const Grid grid = build_grid(1.0, 21);
  const PdeModel heat{PdeKind::Heat1D, 1e-4};
  const InitialCondition ic{IcKind::Poly1DHalf};
  const Trajectory traj = simulate(heat, ic, grid, 0.1, 50);

  TrainingConfig tcfg;
  tcfg.learning_rate = 1e-2;
  tcfg.epochs = 500;
  const TrainResult trained = train(make_dense2(grid.c()), make_dataset({traj}), tcfg);
  std::printf("trained: final mse %.3e\n", trained.loss_history.back());

  const CostParams params{1.0, traj.dt, grid.quad};
  const ReconstructionSpec recon;
  OptimizerConfig ocfg;
  ocfg.max_outer_iters = 50;
  const auto [omega, trace] = optimize(traj, trained.model, recon, params, ocfg);

  const CostReport before = evaluate_cost(
      traj, SensorWeights{Eigen::VectorXd::Ones(grid.c())}, trained.model, recon, params);
  const CostReport after = evaluate_cost(traj, omega, trained.model, recon, params);
  std::printf("J all-ones %.4f -> J optimized %.4f, coverage %.2f, %zu iterations (%s)\n",
              before.total, after.total, coverage(omega), trace.rows.size() - 1,
              trace.stop_reason.c_str());
  return 0;
}
