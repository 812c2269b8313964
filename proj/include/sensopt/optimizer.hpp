#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sensopt/cost.hpp"
#include "sensopt/csv.hpp"
#include "sensopt/rng.hpp"
#include "sensopt/sensor_weights.hpp"

namespace sensopt {

enum class OptMethod { ProjectedGradient, TrustRegionCauchy };

inline std::string to_string(OptMethod m) {
  return m == OptMethod::ProjectedGradient ? "projected_gradient" : "trust_region_cauchy";
}

inline OptMethod opt_method_from_string(const std::string& s) {
  if (s == "projected_gradient") return OptMethod::ProjectedGradient;
  if (s == "trust_region_cauchy") return OptMethod::TrustRegionCauchy;
  throw std::invalid_argument("unknown optimizer method: " + s);
}

/// Both methods consume only J and the approximate gradient, which is all the
/// dropped-reconstruction-Jacobian approximation supplies. Armijo tests the
/// actual J at trial points, so accepted iterates decrease J monotonically
/// even with an inexact direction.
struct OptimizerConfig {
  OptMethod method = OptMethod::ProjectedGradient;
  int max_outer_iters = 200;
  std::uint64_t rng_seed = 42;  // seeds the random start omega_0 ~ uniform(0,1)^c

  // Projected gradient + Armijo.
  double initial_step = 0.1;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 30;

  // Trust region (Cauchy point on the box, infinity-norm radius).
  double initial_trust_radius = 0.25;
  double tr_accept = 0.1;   // accept when ratio >= this
  double tr_shrink = 0.25;  // halve radius when ratio < this
  double tr_expand = 0.75;  // double radius when ratio >= this
  double tr_radius_min = 1e-10;
  double tr_radius_max = 1.0;

  // Stopping.
  double tol_pg = 1e-8;           // on || omega - P(omega - g) ||_2
  double tol_rel_decrease = 0.0;  // 0 disables

  void validate() const {
    if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be >= 1");
    if (initial_step <= 0 || armijo_c1 <= 0 || backtrack <= 0 || backtrack >= 1 ||
        max_backtracks < 1 || initial_trust_radius <= 0 || tr_accept <= 0 ||
        tr_shrink <= 0 || tr_expand <= 0 || tr_radius_min <= 0 || tr_radius_max <= 0 ||
        tol_pg < 0 || tol_rel_decrease < 0)
      throw std::invalid_argument("optimizer config entries must be positive");
  }
};

struct TraceRow {
  int iter = 0;
  double J = 0, sensor_term = 0, error_term = 0;
  double pg_norm = 0;
  double coverage = 0;
  double step = 0;  // accepted Armijo step or current trust radius
  int accepted = 1;
};

struct OptimizationTrace {
  std::vector<TraceRow> rows;
  bool aborted_non_finite = false;
  std::string stop_reason;
};

/// One CSV row per iteration; fixed schema shared with the experiment outputs.
inline void write_trace_csv(const OptimizationTrace& trace, std::ostream& out) {
  out << "iter,J,sensor_term,error_term,pg_norm,coverage,step,accepted\n";
  for (const auto& r : trace.rows)
    out << r.iter << ',' << fmt_double(r.J) << ',' << fmt_double(r.sensor_term) << ','
        << fmt_double(r.error_term) << ',' << fmt_double(r.pg_norm) << ','
        << fmt_double(r.coverage) << ',' << fmt_double(r.step) << ',' << r.accepted << '\n';
}

struct CoverageReport {
  double fraction = 0;
  int active_count = 0;
  std::vector<std::pair<int, int>> runs;  // 1D: maximal contiguous (start, length)
};

inline CoverageReport coverage_report(const SensorWeights& w, const Grid& g) {
  CoverageReport rep;
  const auto active = active_set(w);
  rep.active_count = static_cast<int>(active.size());
  rep.fraction = w.c() ? static_cast<double>(rep.active_count) / w.c() : 0.0;
  if (g.dim == 1) {
    for (std::size_t i = 0; i < active.size();) {
      std::size_t j = i;
      while (j + 1 < active.size() && active[j + 1] == active[j] + 1) ++j;
      rep.runs.emplace_back(active[i], static_cast<int>(j - i + 1));
      i = j + 1;
    }
  }
  return rep;
}

namespace detail {

inline double pg_norm(const Eigen::VectorXd& omega, const Eigen::VectorXd& g) {
  return (omega - (omega - g).cwiseMax(0.0).cwiseMin(1.0)).norm();
}

template <class Eval>
TraceRow make_row(int iter, const CostReport& rep, double pgn, const SensorWeights& w,
                  double step, int accepted, Eval coverage_fn) {
  TraceRow r;
  r.iter = iter;
  r.J = rep.total;
  r.sensor_term = rep.sensor_term;
  r.error_term = rep.error_term;
  r.pg_norm = pgn;
  r.coverage = coverage_fn(w);
  r.step = step;
  r.accepted = accepted;
  return r;
}

}  // namespace detail

/// Outer loop over omega in [0, 1]^c. Starts from a seeded uniform-random
/// omega_0, runs at most cfg.max_outer_iters iterations, and returns the
/// best-seen iterate (not the last: the approximate gradient can stall) with
/// the full trace. Deterministic given cfg.rng_seed.
template <class Model>
std::pair<SensorWeights, OptimizationTrace> optimize(const Trajectory& traj, const Model& model,
                                                     const ReconstructionSpec& spec,
                                                     const CostParams& p,
                                                     const OptimizerConfig& cfg) {
  cfg.validate();
  const int c = traj.grid.c();
  Rng rng(cfg.rng_seed);
  Eigen::VectorXd omega(c);
  for (int i = 0; i < c; ++i) omega(i) = rng.uniform();

  auto cov = [](const SensorWeights& w) { return coverage(w); };
  auto eval = [&](const Eigen::VectorXd& om) {
    return evaluate_cost(traj, SensorWeights{om}, model, spec, p);
  };
  auto grad = [&](const Eigen::VectorXd& om) {
    return approximate_gradient(traj, SensorWeights{om}, model, spec, p);
  };

  OptimizationTrace trace;
  CostReport rep = eval(omega);
  Eigen::VectorXd g = grad(omega);
  auto non_finite = [](double J, const Eigen::VectorXd& gv) {
    return !std::isfinite(J) || !gv.allFinite();
  };
  if (non_finite(rep.total, g)) {
    trace.aborted_non_finite = true;
    trace.stop_reason = "non-finite cost or gradient at the start";
    return {SensorWeights{omega}, trace};
  }

  Eigen::VectorXd best = omega;
  double bestJ = rep.total;
  double pgn = detail::pg_norm(omega, g);
  const double step0 =
      cfg.method == OptMethod::ProjectedGradient ? cfg.initial_step : cfg.initial_trust_radius;
  trace.rows.push_back(detail::make_row(0, rep, pgn, SensorWeights{omega}, step0, 1, cov));

  double radius = cfg.initial_trust_radius;
  for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    if (pgn <= cfg.tol_pg) {
      trace.stop_reason = "projected gradient within tolerance";
      break;
    }

    if (cfg.method == OptMethod::ProjectedGradient) {
      double t = cfg.initial_step;
      bool accepted = false;
      Eigen::VectorXd omega_new;
      CostReport rep_new;
      for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
        omega_new = (omega - t * g).cwiseMax(0.0).cwiseMin(1.0);
        rep_new = eval(omega_new);
        if (!std::isfinite(rep_new.total)) {
          trace.aborted_non_finite = true;
          trace.stop_reason = "non-finite cost at a trial point";
          return {SensorWeights{best}, trace};
        }
        if (rep_new.total <= rep.total - cfg.armijo_c1 * g.dot(omega - omega_new)) {
          accepted = true;
          break;
        }
        t *= cfg.backtrack;
      }
      if (!accepted) {
        trace.rows.push_back(
            detail::make_row(iter, rep, pgn, SensorWeights{omega}, t, 0, cov));
        trace.stop_reason = "line search exhausted";
        break;
      }
      const double decrease = rep.total - rep_new.total;
      omega = omega_new;
      rep = rep_new;
      g = grad(omega);
      if (non_finite(rep.total, g)) {
        trace.aborted_non_finite = true;
        trace.stop_reason = "non-finite gradient";
        return {SensorWeights{best}, trace};
      }
      pgn = detail::pg_norm(omega, g);
      trace.rows.push_back(detail::make_row(iter, rep, pgn, SensorWeights{omega}, t, 1, cov));
      if (rep.total < bestJ) {
        bestJ = rep.total;
        best = omega;
      }
      if (cfg.tol_rel_decrease > 0 &&
          decrease < cfg.tol_rel_decrease * std::max(std::abs(rep.total), 1.0)) {
        trace.stop_reason = "relative decrease within tolerance";
        break;
      }
    } else {
      // Cauchy point: steepest descent scaled to the infinity-norm radius,
      // projected onto the box; ratio test against the linear model.
      const double ginf = g.lpNorm<Eigen::Infinity>();
      Eigen::VectorXd omega_new =
          (omega - (radius / ginf) * g).cwiseMax(0.0).cwiseMin(1.0);
      const Eigen::VectorXd d = omega_new - omega;
      const double predicted = -g.dot(d);
      if (predicted <= 0) {
        trace.stop_reason = "no feasible model decrease";
        break;
      }
      const CostReport rep_new = eval(omega_new);
      if (!std::isfinite(rep_new.total)) {
        trace.aborted_non_finite = true;
        trace.stop_reason = "non-finite cost at a trial point";
        return {SensorWeights{best}, trace};
      }
      const double ratio = (rep.total - rep_new.total) / predicted;
      const bool accepted = ratio >= cfg.tr_accept;
      if (accepted) {
        omega = omega_new;
        rep = rep_new;
        g = grad(omega);
        if (non_finite(rep.total, g)) {
          trace.aborted_non_finite = true;
          trace.stop_reason = "non-finite gradient";
          return {SensorWeights{best}, trace};
        }
        pgn = detail::pg_norm(omega, g);
        if (rep.total < bestJ) {
          bestJ = rep.total;
          best = omega;
        }
      }
      trace.rows.push_back(detail::make_row(iter, rep, pgn, SensorWeights{omega}, radius,
                                            accepted ? 1 : 0, cov));
      if (ratio >= cfg.tr_expand)
        radius = std::min(2 * radius, cfg.tr_radius_max);
      else if (ratio < cfg.tr_shrink)
        radius = std::max(radius / 2, cfg.tr_radius_min);
      if (!accepted && radius <= cfg.tr_radius_min) {
        trace.stop_reason = "trust radius collapsed";
        break;
      }
    }
  }
  if (trace.stop_reason.empty()) trace.stop_reason = "iteration limit";
  return {SensorWeights{best}, trace};
}

}  // namespace sensopt
