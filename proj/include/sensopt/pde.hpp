#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sensopt/grid.hpp"
#include "sensopt/initial_condition.hpp"

namespace sensopt {

enum class PdeKind { Heat1D, Wave1D, Heat2D };

inline std::string to_string(PdeKind k) {
  switch (k) {
    case PdeKind::Heat1D: return "heat1d";
    case PdeKind::Wave1D: return "wave1d";
    case PdeKind::Heat2D: return "heat2d";
  }
  throw std::logic_error("unreachable");
}

inline PdeKind pde_kind_from_string(const std::string& s) {
  if (s == "heat1d") return PdeKind::Heat1D;
  if (s == "wave1d") return PdeKind::Wave1D;
  if (s == "heat2d") return PdeKind::Heat2D;
  throw std::invalid_argument("unknown pde kind: " + s);
}

/// Explicit finite-difference model. `coefficient` is the diffusivity for the
/// heat kinds and the squared wave speed for Wave1D.
struct PdeModel {
  PdeKind kind = PdeKind::Heat1D;
  double coefficient = 1e-4;
};

/// Snapshots z_0..z_K on a grid, each of length grid.c().
struct Trajectory {
  Grid grid;
  double dt = 0.1;
  std::vector<Eigen::VectorXd> snapshots;

  int K() const { return static_cast<int>(snapshots.size()) - 1; }
};

/// CFL ratio of the explicit scheme. Stable iff < 1/2 for the heat kinds
/// (2D uses the summed form) and <= 1 for the wave kind.
inline double stability_margin(const PdeModel& m, const Grid& g, double dt) {
  if (dt <= 0) throw std::invalid_argument("stability_margin: dt must be positive");
  switch (m.kind) {
    case PdeKind::Heat1D: return m.coefficient * dt / (g.h[0] * g.h[0]);
    case PdeKind::Heat2D:
      return m.coefficient * dt * (1.0 / (g.h[0] * g.h[0]) + 1.0 / (g.h[1] * g.h[1]));
    case PdeKind::Wave1D: return m.coefficient * dt * dt / (g.h[0] * g.h[0]);
  }
  throw std::logic_error("unreachable");
}

// One time step per kind. Boundary conditions:
//   Heat1D: Dirichlet u(0) = 0, Neumann u_x(1) = 0 (mirror ghost).
//   Wave1D: Dirichlet at both ends.
//   Heat2D: Dirichlet on the edge x = 0; Neumann (mirror ghost) on the rest.

inline Eigen::VectorXd heat1d_step(const Eigen::VectorXd& z, double r) {
  const int c = static_cast<int>(z.size());
  Eigen::VectorXd zn(c);
  zn(0) = 0.0;
  for (int i = 1; i + 1 < c; ++i) zn(i) = z(i) + r * (z(i - 1) - 2 * z(i) + z(i + 1));
  zn(c - 1) = z(c - 1) + r * (2 * z(c - 2) - 2 * z(c - 1));
  return zn;
}

inline Eigen::VectorXd heat2d_step(const Eigen::VectorXd& z, const Grid& g, double rx,
                                   double ry) {
  const int nx = g.nx(), ny = g.ny();
  Eigen::VectorXd zn(z.size());
  auto at = [&](int ix, int iy) {
    // Mirror ghosts on the Neumann edges x = extent, y = 0, y = extent.
    if (ix == nx) ix = nx - 2;
    if (iy == -1) iy = 1;
    if (iy == ny) iy = ny - 2;
    return z(g.idx(ix, iy));
  };
  for (int iy = 0; iy < ny; ++iy) {
    zn(g.idx(0, iy)) = 0.0;
    for (int ix = 1; ix < nx; ++ix) {
      const double u = at(ix, iy);
      const double dxx = at(ix - 1, iy) - 2 * u + at(ix + 1, iy);
      const double dyy = at(ix, iy - 1) - 2 * u + at(ix, iy + 1);
      zn(g.idx(ix, iy)) = u + rx * dxx + ry * dyy;
    }
  }
  return zn;
}

inline Eigen::VectorXd wave1d_step(const Eigen::VectorXd& z, const Eigen::VectorXd& zprev,
                                   double s) {
  const int c = static_cast<int>(z.size());
  Eigen::VectorXd zn(c);
  zn(0) = 0.0;
  for (int i = 1; i + 1 < c; ++i)
    zn(i) = 2 * z(i) - zprev(i) + s * (z(i - 1) - 2 * z(i) + z(i + 1));
  zn(c - 1) = 0.0;
  return zn;
}

/// Taylor start for u_t(x, 0) = 0: z_1 = z_0 + (s/2) * second difference.
inline Eigen::VectorXd wave1d_first_step(const Eigen::VectorXd& z0, double s) {
  const int c = static_cast<int>(z0.size());
  Eigen::VectorXd z1(c);
  z1(0) = 0.0;
  for (int i = 1; i + 1 < c; ++i)
    z1(i) = z0(i) + 0.5 * s * (z0(i - 1) - 2 * z0(i) + z0(i + 1));
  z1(c - 1) = 0.0;
  return z1;
}

/// Run K steps from an explicit starting state. Refuses unstable settings:
/// an unstable run would only produce unusable training data.
inline Trajectory simulate_from(const PdeModel& m, const Grid& g, const Eigen::VectorXd& z0,
                                double dt, int K) {
  if (K < 1) throw std::invalid_argument("simulate: K must be >= 1");
  if (z0.size() != g.c()) throw std::invalid_argument("simulate: state length mismatch");
  const double margin = stability_margin(m, g, dt);
  const bool stable = m.kind == PdeKind::Wave1D ? margin <= 1.0 : margin < 0.5;
  if (!stable)
    throw std::domain_error("simulate: unstable scheme, stability margin " +
                            std::to_string(margin));

  Trajectory traj;
  traj.grid = g;
  traj.dt = dt;
  traj.snapshots.reserve(K + 1);
  traj.snapshots.push_back(z0);
  if (m.kind == PdeKind::Heat1D) {
    const double r = m.coefficient * dt / (g.h[0] * g.h[0]);
    for (int k = 0; k < K; ++k) traj.snapshots.push_back(heat1d_step(traj.snapshots.back(), r));
  } else if (m.kind == PdeKind::Heat2D) {
    const double rx = m.coefficient * dt / (g.h[0] * g.h[0]);
    const double ry = m.coefficient * dt / (g.h[1] * g.h[1]);
    for (int k = 0; k < K; ++k)
      traj.snapshots.push_back(heat2d_step(traj.snapshots.back(), g, rx, ry));
  } else {
    const double s = m.coefficient * dt * dt / (g.h[0] * g.h[0]);
    traj.snapshots.push_back(wave1d_first_step(z0, s));
    for (int k = 1; k < K; ++k)
      traj.snapshots.push_back(
          wave1d_step(traj.snapshots[k], traj.snapshots[k - 1], s));
  }
  return traj;
}

inline Trajectory simulate(const PdeModel& m, const InitialCondition& ic, const Grid& g,
                           double dt, int K) {
  return simulate_from(m, g, eval_initial_condition(ic, g), dt, K);
}

/// Discrete wave energy lambda * ||Dz||^2 + ||(z_k - z_{k-1}) / dt||^2 with
/// trapezoidal norms; near-conserved by the stable centered scheme.
inline double wave1d_energy(const Eigen::VectorXd& z, const Eigen::VectorXd& zprev,
                            const Grid& g, double lambda, double dt) {
  const int c = static_cast<int>(z.size());
  double grad = 0.0;
  for (int i = 0; i + 1 < c; ++i) {
    const double d = (z(i + 1) - z(i)) / g.h[0];
    grad += d * d * g.h[0];
  }
  double vel = 0.0;
  for (int i = 0; i < c; ++i) {
    const double v = (z(i) - zprev(i)) / dt;
    vel += v * v * g.quad(i);
  }
  return lambda * grad + vel;
}

}  // namespace sensopt
