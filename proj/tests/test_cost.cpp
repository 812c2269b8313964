#include <catch_amalgamated.hpp>

#include <numeric>

#include "sensopt/cost.hpp"
#include "sensopt/simulator_map.hpp"
#include "sensopt/train.hpp"

using namespace sensopt;

namespace {

struct Fixture {
  Grid grid;
  Trajectory traj;
  PredictorModel model;
  CostParams params;

  explicit Fixture(int c, int K, double alpha, std::uint64_t model_seed) {
    grid = build_grid(1.0, c);
    traj = simulate({PdeKind::Heat1D, 1e-4}, {IcKind::Poly1DHalf}, grid, 0.1, K);
    model = make_dense2(c);
    glorot_init(model, model_seed);
    params = CostParams{alpha, 0.1, grid.quad};
  }
};

SensorWeights random_weights(int c, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd w(c);
  for (int i = 0; i < c; ++i) w(i) = rng.uniform();
  return SensorWeights{w};
}

}  // namespace

TEST_CASE("cost matches a naive per-entry loop", "[cost]") {
  const Fixture f(11, 20, 2.5, 71);
  const SensorWeights w = random_weights(11, 72);
  const ReconstructionSpec spec{ReconMethod::CubicSpline1D};
  const CostReport rep = evaluate_cost(f.traj, w, f.model, spec, f.params);

  double sensor = 0.0;
  for (int i = 0; i < 11; ++i) sensor += f.params.alpha * w.omega(i);
  CHECK(rep.sensor_term == Catch::Approx(sensor).epsilon(1e-13));

  double error = 0.0;
  REQUIRE(static_cast<int>(rep.per_step_error.size()) == f.traj.K());
  for (int k = 0; k < f.traj.K(); ++k) {
    const Eigen::VectorXd ur = reconstruct(f.traj.snapshots[k], w, f.grid, spec);
    const Eigen::VectorXd pred = f.model.W2 * (f.model.W1 * ur + f.model.b1) + f.model.b2;
    double ek = 0.0;
    for (int i = 0; i < 11; ++i) {
      const double r = pred(i) - f.traj.snapshots[k + 1](i);
      ek += r * r * f.grid.quad(i);
    }
    ek *= f.params.dt;
    CHECK(rep.per_step_error[k] == Catch::Approx(ek).epsilon(1e-12).margin(1e-15));
    error += ek;
  }
  CHECK(rep.error_term == Catch::Approx(error).epsilon(1e-12));
  CHECK(rep.total == rep.sensor_term + rep.error_term);
  CHECK(std::accumulate(rep.per_step_error.begin(), rep.per_step_error.end(), 0.0) ==
        rep.error_term);
}

TEST_CASE("approximate gradient matches a dense reassembly", "[cost]") {
  const Fixture f(7, 12, 1.25, 81);
  const SensorWeights w = random_weights(7, 82);
  const ReconstructionSpec spec{ReconMethod::CubicSpline1D};
  const Eigen::VectorXd g = approximate_gradient(f.traj, w, f.model, spec, f.params);

  // Rebuild the Jacobian of the affine predictor from probe evaluations only.
  const Eigen::VectorXd p0 = predict(f.model, Eigen::VectorXd::Zero(7));
  Eigen::MatrixXd M(7, 7);
  for (int j = 0; j < 7; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(7);
    e(j) = 1.0;
    M.col(j) = predict(f.model, e) - p0;
  }

  Eigen::VectorXd want = Eigen::VectorXd::Constant(7, f.params.alpha);
  for (int k = 0; k < f.traj.K(); ++k) {
    const Eigen::VectorXd ur = reconstruct(f.traj.snapshots[k], w, f.grid, spec);
    const Eigen::VectorXd r = predict(f.model, ur) - f.traj.snapshots[k + 1];
    want += 2 * f.params.dt * M.transpose() * f.grid.quad.cwiseProduct(r);
  }
  for (int i = 0; i < 7; ++i) CHECK(g(i) == Catch::Approx(want(i)).epsilon(1e-11).margin(1e-13));
}

TEST_CASE("gradient equals alpha exactly on a zero trajectory", "[cost]") {
  // Zero data, zero-bias model: the error part vanishes identically and the
  // single final alpha pass must leave exactly alpha in every entry.
  const Grid g = build_grid(1.0, 9);
  Trajectory traj;
  traj.grid = g;
  traj.dt = 0.1;
  for (int k = 0; k <= 5; ++k) traj.snapshots.push_back(Eigen::VectorXd::Zero(9));
  PredictorModel m = make_dense2(9);
  glorot_init(m, 91);  // biases stay zero
  const SensorWeights w = random_weights(9, 92);
  const Eigen::VectorXd grad = approximate_gradient(
      traj, w, m, {ReconMethod::CubicSpline1D}, CostParams{0.75, 0.1, g.quad});
  for (int i = 0; i < 9; ++i) CHECK(grad(i) == 0.75);
}

TEST_CASE("alpha enters the gradient as a plain offset", "[cost]") {
  const Fixture f(9, 10, 0.0, 93);
  const SensorWeights w = random_weights(9, 94);
  const ReconstructionSpec spec{ReconMethod::CubicSpline1D};
  CostParams with_alpha = f.params;
  with_alpha.alpha = 0.5;
  const Eigen::VectorXd g0 = approximate_gradient(f.traj, w, f.model, spec, f.params);
  const Eigen::VectorXd g1 = approximate_gradient(f.traj, w, f.model, spec, with_alpha);
  for (int i = 0; i < 9; ++i) CHECK(g1(i) - g0(i) == Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("surrogate finite differences agree with the gradient plumbing", "[cost]") {
  const Fixture f(21, 15, 3.0, 95);
  // Weights held away from the 0.5 threshold so the active set cannot flip.
  Rng rng(96);
  Eigen::VectorXd wv(21);
  for (int i = 0; i < 21; ++i)
    wv(i) = rng.uniform() < 0.5 ? rng.uniform(0.0, 0.4) : rng.uniform(0.6, 1.0);
  const SensorWeights w{wv};
  const double dev = surrogate_fd_check(f.traj, w, f.model, {ReconMethod::CubicSpline1D},
                                        f.params, 1e-4);
  CHECK(dev <= 1e-6);
}

TEST_CASE("perfect predictor with full coverage has exactly zero error", "[cost]") {
  const Grid g = build_grid(1.0, 21);
  const PdeModel pde{PdeKind::Heat1D, 1e-4};
  const Trajectory traj = simulate(pde, {IcKind::Poly1DQuarter}, g, 0.1, 25);
  const SimulatorMap sim(pde, g, 0.1);
  const SensorWeights ones{Eigen::VectorXd::Ones(21)};
  const CostReport rep =
      evaluate_cost(traj, ones, sim, {ReconMethod::CubicSpline1D}, CostParams{5.0, 0.1, g.quad});
  CHECK(rep.error_term == 0.0);
  for (double e : rep.per_step_error) CHECK(e == 0.0);
  CHECK(rep.total == 5.0 * 21);
}

TEST_CASE("trained predictor prefers full coverage over sparse sets", "[cost]") {
  const Grid g = build_grid(1.0, 21);
  const Trajectory traj = simulate({PdeKind::Heat1D, 1e-4}, {IcKind::Poly1DHalf}, g, 0.1, 40);
  TrainingConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.epochs = 600;
  const PredictorModel model = train(make_dense2(21), make_dataset({traj}), cfg).model;
  const ReconstructionSpec spec{ReconMethod::CubicSpline1D};
  const CostParams p{0.0, 0.1, g.quad};

  const double full =
      evaluate_cost(traj, SensorWeights{Eigen::VectorXd::Ones(21)}, model, spec, p).error_term;
  for (std::uint64_t s : {101ull, 102ull, 103ull}) {
    Rng rng(s);
    Eigen::VectorXd wv = Eigen::VectorXd::Zero(21);
    for (int n = 0; n < 5; ++n) wv(static_cast<int>(rng.raw() % 21)) = 1.0;
    const double sparse = evaluate_cost(traj, SensorWeights{wv}, model, spec, p).error_term;
    CHECK(full < sparse);
  }
}

TEST_CASE("cost input validation", "[cost]") {
  const Fixture f(11, 5, 1.0, 97);
  const SensorWeights w = random_weights(10, 98);  // wrong length
  CHECK_THROWS_AS(evaluate_cost(f.traj, w, f.model, {ReconMethod::CubicSpline1D}, f.params),
                  std::invalid_argument);
  CostParams bad = f.params;
  bad.alpha = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = f.params;
  bad.dt = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  // fd check refuses weights that sit on the activation threshold.
  Eigen::VectorXd wv = Eigen::VectorXd::Constant(11, 0.7);
  wv(3) = 0.5 + 1e-9;
  CHECK_THROWS_AS(surrogate_fd_check(f.traj, SensorWeights{wv}, f.model,
                                     {ReconMethod::CubicSpline1D}, f.params, 1e-4),
                  std::invalid_argument);
}
