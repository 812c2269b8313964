// Command-line front end: run the pipeline (or a prefix of it) from a config
// file or a builtin experiment name, and summarize result directories.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sensopt/sensopt.hpp"

namespace {

using namespace sensopt;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> alpha;
  std::optional<int> iters;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--seed", ov.seed, "Master RNG seed (reseeds training and optimizer)");
  cmd->add_option("--out", ov.out, "Output directory (default from config)");
  cmd->add_option("--alpha", ov.alpha, "Sensor weight alpha override");
  cmd->add_option("--iters", ov.iters, "Maximum outer optimizer iterations");
}

ExperimentConfig resolve_config(const std::string& arg, const Overrides& ov) {
  ExperimentConfig cfg;
  if (std::filesystem::exists(arg)) {
    cfg = load_config(arg);
  } else {
    cfg = builtin_experiment(arg);  // throws with the name list on a miss
  }
  if (ov.seed) cfg.apply_seed(*ov.seed);
  if (ov.out) cfg.out_dir = *ov.out;
  if (ov.alpha) cfg.alpha = *ov.alpha;
  if (ov.iters) cfg.optimizer.max_outer_iters = *ov.iters;
  return cfg;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  auto out = open_out(path);
  out << "k,t";
  for (int i = 0; i < traj.grid.c(); ++i) out << ",z" << i;
  out << "\n";
  for (int k = 0; k <= traj.K(); ++k) {
    out << k << ',' << fmt_double(k * traj.dt);
    for (int i = 0; i < traj.grid.c(); ++i) out << ',' << fmt_double(traj.snapshots[k](i));
    out << "\n";
  }
}

struct PartialRun {
  ExperimentConfig cfg;
  Grid grid;
  Trajectory traj;
  PredictorModel model;
  std::vector<double> train_loss;
};

PartialRun run_through_simulate(ExperimentConfig cfg) {
  PartialRun run;
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw StageError(Stage::Config, e.what());
  }
  run.cfg = cfg;
  run.grid = cfg.make_grid();
  std::filesystem::create_directories(cfg.out_dir);
  save_config(cfg, cfg.out_dir + "/config.json");
  try {
    run.traj = simulate(cfg.pde, cfg.ic, run.grid, cfg.dt, cfg.steps);
  } catch (const std::exception& e) {
    throw StageError(Stage::Simulate, e.what());
  }
  write_trajectory_csv(run.traj, cfg.out_dir + "/trajectory.csv");
  return run;
}

void run_train_stage(PartialRun& run) {
  try {
    const Dataset data = make_dataset({run.traj});
    PredictorModel init = run.cfg.arch == Arch::Conv1
                              ? make_conv1(run.grid.nx(), run.grid.ny())
                              : make_dense2(run.grid.c());
    TrainResult tr = train(std::move(init), data, run.cfg.training);
    run.model = std::move(tr.model);
    run.train_loss = std::move(tr.loss_history);
  } catch (const std::exception& e) {
    throw StageError(Stage::Train, e.what());
  }
  save_checkpoint(run.model, run.cfg.out_dir + "/model.json");
  auto out = open_out(run.cfg.out_dir + "/loss_history.csv");
  out << "epoch,train_mse\n";
  for (std::size_t e = 0; e < run.train_loss.size(); ++e)
    out << e + 1 << ',' << fmt_double(run.train_loss[e]) << '\n';
}

int cmd_simulate(const std::string& arg, const Overrides& ov) {
  auto run = run_through_simulate(resolve_config(arg, ov));
  std::printf("simulated %s: K=%d, c=%d -> %s/trajectory.csv\n", run.cfg.name.c_str(),
              run.traj.K(), run.grid.c(), run.cfg.out_dir.c_str());
  return 0;
}

int cmd_train(const std::string& arg, const Overrides& ov) {
  auto run = run_through_simulate(resolve_config(arg, ov));
  run_train_stage(run);
  std::printf("trained %s: final mse %s -> %s/model.json\n", run.cfg.name.c_str(),
              fmt_double(run.train_loss.back()).c_str(), run.cfg.out_dir.c_str());
  return 0;
}

int cmd_optimize(const std::string& arg, const Overrides& ov) {
  auto run = run_through_simulate(resolve_config(arg, ov));
  run_train_stage(run);
  const CostParams params{run.cfg.alpha, run.cfg.dt, run.grid.quad};
  SensorWeights w;
  OptimizationTrace trace;
  try {
    auto [wbest, tr] = optimize(run.traj, run.model, run.cfg.recon, params, run.cfg.optimizer);
    w = std::move(wbest);
    trace = std::move(tr);
    if (trace.aborted_non_finite)
      throw std::runtime_error("optimizer aborted on non-finite values");
  } catch (const std::exception& e) {
    throw StageError(Stage::Optimize, e.what());
  }
  {
    auto out = open_out(run.cfg.out_dir + "/cost_trace.csv");
    write_trace_csv(trace, out);
  }
  ExperimentResult partial;
  partial.traj = run.traj;
  partial.omega_final = w;
  detail::write_sensors_csv(partial, run.cfg.out_dir + "/sensors.csv");
  std::printf("optimized %s: J %s -> %s, coverage %.3f (%s)\n", run.cfg.name.c_str(),
              fmt_double(trace.rows.front().J).c_str(),
              fmt_double(trace.rows.back().J).c_str(), coverage(w),
              trace.stop_reason.c_str());
  return 0;
}

int cmd_run(const std::string& arg, const Overrides& ov) {
  const ExperimentResult res = run_experiment(resolve_config(arg, ov));
  std::printf("%s: J(all-ones)=%s  J(final)=%s  coverage=%.3f  iters=%d  -> %s\n",
              res.config.name.c_str(), fmt_double(res.cost_all_ones.total).c_str(),
              fmt_double(res.cost_final.total).c_str(), res.cover.fraction,
              res.trace.rows.empty() ? 0 : res.trace.rows.back().iter,
              res.config.out_dir.c_str());
  return 0;
}

int cmd_report(const std::string& dir) {
  std::ifstream in(dir + "/result.json");
  if (!in) throw StageError(Stage::Report, "no result.json in " + dir);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw StageError(Stage::Report, std::string("corrupt result.json: ") + e.what());
  }
  const auto& m = j.at("metrics");
  std::printf("experiment : %s\n", j.at("config").at("name").get<std::string>().c_str());
  std::printf("config hash: %s\n", j.at("config_hash").get<std::string>().c_str());
  std::printf("rng seed   : %llu\n",
              static_cast<unsigned long long>(j.at("rng_seed").get<std::uint64_t>()));
  std::printf("J final    : %.8g (sensor %.8g + error %.8g)\n",
              m.at("J_final").get<double>(), m.at("sensor_term_final").get<double>(),
              m.at("error_term_final").get<double>());
  std::printf("J all-ones : %.8g\n", m.at("J_all_ones").get<double>());
  std::printf("coverage   : %.4f (%d sensors)\n", m.at("coverage").get<double>(),
              m.at("active_sensors").get<int>());
  std::printf("iterations : %d (%s)\n", m.at("outer_iterations").get<int>(),
              m.at("stop_reason").get<std::string>().c_str());
  std::printf("train mse  : %.8g\n", m.at("final_train_mse").get<double>());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor shape optimization for learned PDE predictors"};
  app.require_subcommand(1);

  std::string config_arg, report_dir;
  Overrides ov;

  auto* sim = app.add_subcommand("simulate", "Simulate the trajectory and write it as CSV");
  sim->add_option("config", config_arg, "Config file or builtin experiment name")->required();
  add_override_flags(sim, ov);

  auto* trn = app.add_subcommand("train", "Simulate, then train the predictor checkpoint");
  trn->add_option("config", config_arg, "Config file or builtin experiment name")->required();
  add_override_flags(trn, ov);

  auto* opt = app.add_subcommand("optimize", "Run the pipeline through sensor optimization");
  opt->add_option("config", config_arg, "Config file or builtin experiment name")->required();
  add_override_flags(opt, ov);

  auto* run = app.add_subcommand("run", "Full pipeline with metrics and plot data");
  run->add_option("config", config_arg, "Builtin experiment name or config file")->required();
  add_override_flags(run, ov);

  auto* rep = app.add_subcommand("report", "Summarize a result directory");
  rep->add_option("dir", report_dir, "Directory containing result.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_arg, ov);
    if (trn->parsed()) return cmd_train(config_arg, ov);
    if (opt->parsed()) return cmd_optimize(config_arg, ov);
    if (run->parsed()) return cmd_run(config_arg, ov);
    if (rep->parsed()) return cmd_report(report_dir);
  } catch (const sensopt::StageError& e) {
    std::cerr << "error " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error [stage:config] " << e.what() << "\n";
    return 1;
  }
  return 0;
}
