#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sensopt/cost.hpp"
#include "sensopt/csv.hpp"
#include "sensopt/grid.hpp"
#include "sensopt/initial_condition.hpp"
#include "sensopt/optimizer.hpp"
#include "sensopt/pde.hpp"
#include "sensopt/predictor.hpp"
#include "sensopt/reconstruct.hpp"
#include "sensopt/train.hpp"
#include "sensopt/version.hpp"

namespace sensopt {

/// Everything needed to rerun an experiment. rng_seed is the master seed:
/// applying it sets training.rng_seed = seed and optimizer.rng_seed = seed+1,
/// so one --seed flag reseeds the whole pipeline.
struct ExperimentConfig {
  std::string name = "custom";
  PdeModel pde;
  int dim = 1;
  std::array<int, 2> n_points = {101, 1};
  std::array<double, 2> extent = {1.0, 1.0};
  double dt = 0.1;
  int steps = 100;  // K
  InitialCondition ic;
  double alpha = 5.0;
  Arch arch = Arch::Dense2;
  TrainingConfig training;
  ReconstructionSpec recon;
  OptimizerConfig optimizer;
  std::uint64_t rng_seed = 42;
  std::string out_dir;

  Grid make_grid() const {
    return dim == 1 ? build_grid(extent[0], n_points[0]) : build_grid(extent, n_points);
  }

  void apply_seed(std::uint64_t seed) {
    rng_seed = seed;
    training.rng_seed = seed;
    optimizer.rng_seed = seed + 1;
  }

  /// Module preconditions collected at load time, stability margin included:
  /// refusing here keeps every later stage's inputs usable.
  void validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("config: dim must be 1 or 2");
    if ((pde.kind == PdeKind::Heat2D) != (dim == 2))
      throw std::invalid_argument("config: pde kind does not match dim");
    if (ic.dim() != dim) throw std::invalid_argument("config: initial condition dim mismatch");
    if ((arch == Arch::Conv1) != (dim == 2))
      throw std::invalid_argument("config: arch does not match dim");
    if (steps < 1) throw std::invalid_argument("config: steps must be >= 1");
    if (alpha < 0) throw std::invalid_argument("config: alpha must be >= 0");
    training.validate();
    optimizer.validate();
    const Grid g = make_grid();
    const double margin = stability_margin(pde, g, dt);
    const bool stable = pde.kind == PdeKind::Wave1D ? margin <= 1.0 : margin < 0.5;
    if (!stable)
      throw std::invalid_argument("config: unstable scheme (stability margin " +
                                  std::to_string(margin) + ")");
    if ((recon.method == ReconMethod::CubicSpline1D) != (dim == 1))
      throw std::invalid_argument("config: reconstruction method does not match dim");
  }
};

// JSON round-trip. Keys are sorted by nlohmann, so dumps are canonical and
// the config hash is stable.

inline void to_json(nlohmann::json& j, const TrainingConfig& c) {
  j = {{"learning_rate", c.learning_rate}, {"beta1", c.beta1},
       {"beta2", c.beta2},                 {"epsilon", c.epsilon},
       {"epochs", c.epochs},               {"batch_size", c.batch_size},
       {"rng_seed", c.rng_seed},           {"validation_fraction", c.validation_fraction}};
}

inline void from_json(const nlohmann::json& j, TrainingConfig& c) {
  j.at("learning_rate").get_to(c.learning_rate);
  j.at("beta1").get_to(c.beta1);
  j.at("beta2").get_to(c.beta2);
  j.at("epsilon").get_to(c.epsilon);
  j.at("epochs").get_to(c.epochs);
  j.at("batch_size").get_to(c.batch_size);
  j.at("rng_seed").get_to(c.rng_seed);
  j.at("validation_fraction").get_to(c.validation_fraction);
}

inline void to_json(nlohmann::json& j, const OptimizerConfig& c) {
  j = {{"method", to_string(c.method)},
       {"max_outer_iters", c.max_outer_iters},
       {"rng_seed", c.rng_seed},
       {"initial_step", c.initial_step},
       {"armijo_c1", c.armijo_c1},
       {"backtrack", c.backtrack},
       {"max_backtracks", c.max_backtracks},
       {"initial_trust_radius", c.initial_trust_radius},
       {"tr_accept", c.tr_accept},
       {"tr_shrink", c.tr_shrink},
       {"tr_expand", c.tr_expand},
       {"tr_radius_min", c.tr_radius_min},
       {"tr_radius_max", c.tr_radius_max},
       {"tol_pg", c.tol_pg},
       {"tol_rel_decrease", c.tol_rel_decrease}};
}

inline void from_json(const nlohmann::json& j, OptimizerConfig& c) {
  c.method = opt_method_from_string(j.at("method").get<std::string>());
  j.at("max_outer_iters").get_to(c.max_outer_iters);
  j.at("rng_seed").get_to(c.rng_seed);
  j.at("initial_step").get_to(c.initial_step);
  j.at("armijo_c1").get_to(c.armijo_c1);
  j.at("backtrack").get_to(c.backtrack);
  j.at("max_backtracks").get_to(c.max_backtracks);
  j.at("initial_trust_radius").get_to(c.initial_trust_radius);
  j.at("tr_accept").get_to(c.tr_accept);
  j.at("tr_shrink").get_to(c.tr_shrink);
  j.at("tr_expand").get_to(c.tr_expand);
  j.at("tr_radius_min").get_to(c.tr_radius_min);
  j.at("tr_radius_max").get_to(c.tr_radius_max);
  j.at("tol_pg").get_to(c.tol_pg);
  j.at("tol_rel_decrease").get_to(c.tol_rel_decrease);
}

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = {{"name", c.name},
       {"pde", {{"kind", to_string(c.pde.kind)}, {"coefficient", c.pde.coefficient}}},
       {"grid",
        {{"dim", c.dim},
         {"n_points", c.n_points},
         {"extent", c.extent}}},
       {"dt", c.dt},
       {"steps", c.steps},
       {"initial_condition",
        {{"kind", to_string(c.ic.kind)}, {"normalize", c.ic.normalize}}},
       {"alpha", c.alpha},
       {"arch", to_string(c.arch)},
       {"training", c.training},
       {"reconstruction",
        {{"method", to_string(c.recon.method)}, {"boundary_anchor", c.recon.boundary_anchor}}},
       {"optimizer", c.optimizer},
       {"rng_seed", c.rng_seed},
       {"out_dir", c.out_dir}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  j.at("name").get_to(c.name);
  c.pde.kind = pde_kind_from_string(j.at("pde").at("kind").get<std::string>());
  j.at("pde").at("coefficient").get_to(c.pde.coefficient);
  j.at("grid").at("dim").get_to(c.dim);
  j.at("grid").at("n_points").get_to(c.n_points);
  j.at("grid").at("extent").get_to(c.extent);
  j.at("dt").get_to(c.dt);
  j.at("steps").get_to(c.steps);
  c.ic.kind = ic_kind_from_string(j.at("initial_condition").at("kind").get<std::string>());
  j.at("initial_condition").at("normalize").get_to(c.ic.normalize);
  j.at("alpha").get_to(c.alpha);
  c.arch = arch_from_string(j.at("arch").get<std::string>());
  j.at("training").get_to(c.training);
  c.recon.method =
      recon_method_from_string(j.at("reconstruction").at("method").get<std::string>());
  j.at("reconstruction").at("boundary_anchor").get_to(c.recon.boundary_anchor);
  j.at("optimizer").get_to(c.optimizer);
  j.at("rng_seed").get_to(c.rng_seed);
  j.at("out_dir").get_to(c.out_dir);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config: " + path);
  nlohmann::json j;
  in >> j;
  return j.get<ExperimentConfig>();
}

inline void save_config(const ExperimentConfig& cfg, const std::string& path) {
  auto out = open_out(path);
  out << nlohmann::json(cfg).dump(2) << "\n";
}

/// FNV-1a over the canonical JSON dump.
inline std::string config_hash(const ExperimentConfig& cfg) {
  const std::string s = nlohmann::json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// The experiments of the source setups, by name. 1D runs use the dense
/// predictor on a 101-point mesh; the 2D run uses the single-filter conv on
/// 34 x 34. All default to K = 100 steps of dt = 0.1 with master seed 42.
inline ExperimentConfig builtin_experiment(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.apply_seed(42);
  cfg.out_dir = "out/" + name;

  auto heat1d = [&](IcKind ic) {
    cfg.pde = {PdeKind::Heat1D, 1e-4};
    cfg.alpha = 5.0;
    cfg.ic.kind = ic;
  };
  auto wave1d = [&](IcKind ic) {
    cfg.pde = {PdeKind::Wave1D, 3e-3};
    cfg.alpha = 2.0;
    cfg.ic.kind = ic;
  };

  if (name == "heat1d-ic1") heat1d(IcKind::Poly1DHalf);
  else if (name == "heat1d-ic2") heat1d(IcKind::Poly1DQuarter);
  else if (name == "heat1d-ic3") heat1d(IcKind::Poly1DNegHalf);
  else if (name == "heat1d-step") heat1d(IcKind::HeavisideHalf);
  else if (name == "wave1d-ic1") wave1d(IcKind::Poly1DHalf);
  else if (name == "wave1d-ic2") wave1d(IcKind::Poly1DNegHalf);
  else if (name == "wave1d-ic3") wave1d(IcKind::Poly1DQuarter);
  else if (name == "heat2d") {
    cfg.pde = {PdeKind::Heat2D, 1e-4};
    cfg.dim = 2;
    cfg.n_points = {34, 34};
    cfg.alpha = 10.0;
    cfg.ic.kind = IcKind::Poly2D;
    cfg.arch = Arch::Conv1;
    cfg.recon.method = ReconMethod::BilinearGrid2D;
  } else {
    throw std::invalid_argument("unknown builtin experiment: " + name);
  }
  return cfg;
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "heat1d-ic1", "heat1d-ic2", "heat1d-ic3", "heat1d-step",
      "wave1d-ic1", "wave1d-ic2", "wave1d-ic3", "heat2d"};
  return names;
}

enum class Stage { Config, Simulate, Train, Optimize, Metrics, Report };

inline std::string to_string(Stage s) {
  switch (s) {
    case Stage::Config: return "config";
    case Stage::Simulate: return "simulate";
    case Stage::Train: return "train";
    case Stage::Optimize: return "optimize";
    case Stage::Metrics: return "metrics";
    case Stage::Report: return "report";
  }
  throw std::logic_error("unreachable");
}

struct StageError : std::runtime_error {
  Stage stage;
  StageError(Stage s, const std::string& what)
      : std::runtime_error("[stage:" + to_string(s) + "] " + what), stage(s) {}
};

/// Per-step trapezoidal integral of |z_k - predictions[k-1]| for k = 1..K.
/// predictions[k-1] is the open-loop prediction of snapshot k.
inline std::vector<double> l1_error_over_time(const Trajectory& traj,
                                              const std::vector<Eigen::VectorXd>& predictions) {
  if (static_cast<int>(predictions.size()) != traj.K())
    throw std::invalid_argument("l1_error_over_time: need one prediction per step");
  std::vector<double> l1;
  l1.reserve(traj.K());
  for (int k = 1; k <= traj.K(); ++k) {
    const Eigen::VectorXd& p = predictions[k - 1];
    if (p.size() != traj.grid.c())
      throw std::invalid_argument("l1_error_over_time: prediction length mismatch");
    l1.push_back(((traj.snapshots[k] - p).cwiseAbs().array() * traj.grid.quad.array()).sum());
  }
  return l1;
}

struct ExperimentResult {
  ExperimentConfig config;
  std::string hash;
  Trajectory traj;
  PredictorModel model;
  std::vector<double> train_loss;
  SensorWeights omega_final;
  CoverageReport cover;
  CostReport cost_final;
  CostReport cost_all_ones;
  OptimizationTrace trace;
  std::vector<double> l1_error;     // entries k = 1..K
  std::vector<int> snapshot_steps;  // {0, K/4, K/2, 3K/4, K}, deduplicated
};

namespace detail {

inline void write_sensors_csv(const ExperimentResult& res, const std::string& path) {
  auto out = open_out(path);
  const Grid& g = res.traj.grid;
  out << (g.dim == 1 ? "index,x,omega,active\n" : "index,x,y,omega,active\n");
  const auto active = active_set(res.omega_final);
  std::vector<char> is_active(g.c(), 0);
  for (int a : active) is_active[a] = 1;
  for (int i = 0; i < g.c(); ++i) {
    out << i << ',' << fmt_double(g.x(g.dim == 1 ? i : i % g.nx()));
    if (g.dim == 2) out << ',' << fmt_double(g.y(i / g.nx()));
    out << ',' << fmt_double(res.omega_final.omega(i)) << ',' << int(is_active[i]) << '\n';
  }
}

inline void write_snapshot_csv(const ExperimentResult& res, int k, const Eigen::VectorXd& up,
                               const std::string& path) {
  auto out = open_out(path);
  const Grid& g = res.traj.grid;
  const Eigen::VectorXd& ur = res.traj.snapshots[k];
  const auto active = active_set(res.omega_final);
  std::vector<char> is_active(g.c(), 0);
  for (int a : active) is_active[a] = 1;
  out << (g.dim == 1 ? "x,u_r,u_p,sensor_active\n" : "x,y,u_r,u_p,sensor_active\n");
  for (int i = 0; i < g.c(); ++i) {
    out << fmt_double(g.x(g.dim == 1 ? i : i % g.nx()));
    if (g.dim == 2) out << ',' << fmt_double(g.y(i / g.nx()));
    out << ',' << fmt_double(ur(i)) << ',' << fmt_double(up(i)) << ',' << int(is_active[i])
        << '\n';
  }
}

}  // namespace detail

/// Write the CSV bundle and the JSON manifest for a completed result.
/// Deterministic byte-for-byte: re-exporting the same result reproduces
/// identical files.
inline void export_plot_data(const ExperimentResult& res, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  fs::create_directories(dir + "/snapshots");

  save_config(res.config, dir + "/config.json");
  {
    auto out = open_out(dir + "/cost_trace.csv");
    write_trace_csv(res.trace, out);
  }
  {
    auto out = open_out(dir + "/l1_error.csv");
    out << "k,t,l1\n";
    for (std::size_t i = 0; i < res.l1_error.size(); ++i) {
      const int k = static_cast<int>(i) + 1;
      out << k << ',' << fmt_double(k * res.traj.dt) << ',' << fmt_double(res.l1_error[i])
          << '\n';
    }
  }
  {
    auto out = open_out(dir + "/loss_history.csv");
    out << "epoch,train_mse\n";
    for (std::size_t e = 0; e < res.train_loss.size(); ++e)
      out << e + 1 << ',' << fmt_double(res.train_loss[e]) << '\n';
  }
  detail::write_sensors_csv(res, dir + "/sensors.csv");
  for (int k : res.snapshot_steps) {
    // Open-loop prediction of snapshot k; the k = 0 snapshot predates any
    // prediction and dumps the true state in both columns.
    const Eigen::VectorXd up =
        k == 0 ? res.traj.snapshots[0]
               : Eigen::VectorXd(predict(
                     res.model, reconstruct(res.traj.snapshots[k - 1], res.omega_final,
                                            res.traj.grid, res.config.recon)));
    detail::write_snapshot_csv(res, k, up, dir + "/snapshots/snap_k" + std::to_string(k) + ".csv");
  }

  nlohmann::json manifest;
  manifest["format"] = "sensopt-result";
  manifest["code_version"] = kVersion;
  manifest["config"] = res.config;
  manifest["config_hash"] = res.hash;
  manifest["rng_seed"] = res.config.rng_seed;
  manifest["metrics"] = {
      {"J_final", res.cost_final.total},
      {"sensor_term_final", res.cost_final.sensor_term},
      {"error_term_final", res.cost_final.error_term},
      {"J_all_ones", res.cost_all_ones.total},
      {"coverage", res.cover.fraction},
      {"active_sensors", res.cover.active_count},
      {"outer_iterations", res.trace.rows.empty() ? 0 : res.trace.rows.back().iter},
      {"stop_reason", res.trace.stop_reason},
      {"final_train_mse", res.train_loss.empty() ? 0.0 : res.train_loss.back()},
  };
  manifest["snapshot_steps"] = res.snapshot_steps;
  auto out = open_out(dir + "/result.json");
  out << manifest.dump(2) << "\n";
}

/// simulate -> make_dataset -> train -> optimize -> metrics -> export.
/// Fully deterministic per seed. Any stage failure is rethrown as StageError
/// with the stage tag; artifacts written before the failure stay on disk.
inline ExperimentResult run_experiment(ExperimentConfig cfg, bool write_files = true) {
  ExperimentResult res;
  auto guard = [](Stage s, auto&& fn) {
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(s, e.what());
    }
  };

  guard(Stage::Config, [&] {
    cfg.validate();
    res.config = cfg;
    res.hash = config_hash(cfg);
    if (write_files && !cfg.out_dir.empty()) {
      std::filesystem::create_directories(cfg.out_dir);
      save_config(cfg, cfg.out_dir + "/config.json");
    }
    return 0;
  });
  const Grid grid = cfg.make_grid();

  guard(Stage::Simulate, [&] {
    res.traj = simulate(cfg.pde, cfg.ic, grid, cfg.dt, cfg.steps);
    return 0;
  });

  guard(Stage::Train, [&] {
    const Dataset data = make_dataset({res.traj});
    PredictorModel init = cfg.arch == Arch::Conv1 ? make_conv1(grid.nx(), grid.ny())
                                                  : make_dense2(grid.c());
    TrainResult tr = train(std::move(init), data, cfg.training);
    res.model = std::move(tr.model);
    res.train_loss = std::move(tr.loss_history);
    return 0;
  });

  const CostParams params{cfg.alpha, cfg.dt, grid.quad};
  guard(Stage::Optimize, [&] {
    auto [w, trace] = optimize(res.traj, res.model, cfg.recon, params, cfg.optimizer);
    res.omega_final = std::move(w);
    res.trace = std::move(trace);
    if (res.trace.aborted_non_finite)
      throw std::runtime_error("optimizer aborted on non-finite values: " +
                               res.trace.stop_reason);
    return 0;
  });

  guard(Stage::Metrics, [&] {
    res.cover = coverage_report(res.omega_final, grid);
    res.cost_final = evaluate_cost(res.traj, res.omega_final, res.model, cfg.recon, params);
    res.cost_all_ones = evaluate_cost(
        res.traj, SensorWeights{Eigen::VectorXd::Ones(grid.c())}, res.model, cfg.recon, params);
    std::vector<Eigen::VectorXd> preds;
    preds.reserve(res.traj.K());
    for (int k = 0; k < res.traj.K(); ++k)
      preds.push_back(predict(
          res.model, reconstruct(res.traj.snapshots[k], res.omega_final, grid, cfg.recon)));
    res.l1_error = l1_error_over_time(res.traj, preds);
    const int K = cfg.steps;
    for (int k : {0, K / 4, K / 2, 3 * K / 4, K})
      if (res.snapshot_steps.empty() || res.snapshot_steps.back() != k)
        res.snapshot_steps.push_back(k);
    return 0;
  });

  if (write_files && !cfg.out_dir.empty())
    guard(Stage::Report, [&] {
      export_plot_data(res, cfg.out_dir);
      return 0;
    });
  return res;
}

}  // namespace sensopt
