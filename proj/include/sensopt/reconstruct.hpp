#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "sensopt/grid.hpp"
#include "sensopt/sensor_weights.hpp"
#include "sensopt/spline.hpp"

namespace sensopt {

enum class ReconMethod { CubicSpline1D, BilinearGrid2D };

inline std::string to_string(ReconMethod m) {
  return m == ReconMethod::CubicSpline1D ? "cubic_spline_1d" : "bilinear_grid_2d";
}

inline ReconMethod recon_method_from_string(const std::string& s) {
  if (s == "cubic_spline_1d") return ReconMethod::CubicSpline1D;
  if (s == "bilinear_grid_2d") return ReconMethod::BilinearGrid2D;
  throw std::invalid_argument("unknown reconstruction method: " + s);
}

/// `boundary_anchor` forces the domain corners into the interpolation support
/// (stabilizes extrapolation when sensors cluster in the interior). Off by
/// default.
struct ReconstructionSpec {
  ReconMethod method = ReconMethod::CubicSpline1D;
  bool boundary_anchor = false;
};

namespace detail {

// Piecewise-linear interpolation through (xs, vals), constant beyond the ends.
inline double interp_linear(const std::vector<double>& xs, const std::vector<double>& vals,
                            double xq) {
  if (xq <= xs.front()) return vals.front();
  if (xq >= xs.back()) return vals.back();
  const int j =
      static_cast<int>(std::upper_bound(xs.begin(), xs.end(), xq) - xs.begin()) - 1;
  const double t = (xq - xs[j]) / (xs[j + 1] - xs[j]);
  return vals[j] + t * (vals[j + 1] - vals[j]);
}

inline Eigen::VectorXd reconstruct_1d(const Eigen::VectorXd& z, const std::vector<int>& active,
                                      const Grid& g) {
  const int c = g.c();
  const int n = static_cast<int>(active.size());
  Eigen::VectorXd out(c);
  if (n == 0) return Eigen::VectorXd::Zero(c);
  if (n == 1) {
    out.setConstant(z(active[0]));
  } else if (n == 2) {
    // Linear through the two sensors, extended linearly outside.
    const double x0 = g.x(active[0]), x1 = g.x(active[1]);
    const double v0 = z(active[0]), v1 = z(active[1]);
    const double slope = (v1 - v0) / (x1 - x0);
    for (int i = 0; i < c; ++i) out(i) = v0 + slope * (g.x(i) - x0);
  } else if (n == 3) {
    // Lagrange quadratic through the three sensors.
    const double x0 = g.x(active[0]), x1 = g.x(active[1]), x2 = g.x(active[2]);
    const double v0 = z(active[0]), v1 = z(active[1]), v2 = z(active[2]);
    for (int i = 0; i < c; ++i) {
      const double x = g.x(i);
      out(i) = v0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)) +
               v1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2)) +
               v2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
    }
  } else {
    std::vector<double> xs(n), ys(n);
    for (int a = 0; a < n; ++a) {
      xs[a] = g.x(active[a]);
      ys[a] = z(active[a]);
    }
    const CubicSpline s(std::move(xs), std::move(ys));
    for (int i = 0; i < c; ++i) out(i) = s(g.x(i));
  }
  for (int a : active) out(a) = z(a);  // sensor readings pass through bit-identically
  return out;
}

// Separable pass: rows holding at least one sensor are filled by linear
// interpolation in x; every column is then filled by linear interpolation in
// y between those rows. Constant extension beyond the outermost sensor of a
// line. This defines bilinear interpolation on the nearest enclosing
// rectangle of sensor-bearing grid lines.
inline Eigen::VectorXd reconstruct_2d(const Eigen::VectorXd& z, const std::vector<int>& active,
                                      const Grid& g) {
  const int nx = g.nx(), ny = g.ny();
  if (active.empty()) return Eigen::VectorXd::Zero(g.c());

  std::vector<std::vector<int>> row_sensors(ny);
  for (int a : active) row_sensors[a / nx].push_back(a % nx);

  std::vector<int> rows;  // sensor-bearing rows, ascending
  Eigen::MatrixXd rowvals(ny, nx);
  for (int iy = 0; iy < ny; ++iy) {
    if (row_sensors[iy].empty()) continue;
    rows.push_back(iy);
    std::vector<double> xs, vals;
    xs.reserve(row_sensors[iy].size());
    for (int ix : row_sensors[iy]) {
      xs.push_back(g.x(ix));
      vals.push_back(z(g.idx(ix, iy)));
    }
    for (int ix = 0; ix < nx; ++ix) rowvals(iy, ix) = interp_linear(xs, vals, g.x(ix));
  }

  Eigen::VectorXd out(g.c());
  std::vector<double> rys;
  rys.reserve(rows.size());
  for (int r : rows) rys.push_back(g.y(r));
  for (int ix = 0; ix < nx; ++ix) {
    std::vector<double> vals;
    vals.reserve(rows.size());
    for (int r : rows) vals.push_back(rowvals(r, ix));
    for (int iy = 0; iy < ny; ++iy) out(g.idx(ix, iy)) = interp_linear(rys, vals, g.y(iy));
  }
  for (int a : active) out(a) = z(a);
  return out;
}

}  // namespace detail

/// The reconstructor f_r: returns z at active sensors and interpolated values
/// elsewhere. Depends on omega only through the active set; never throws for
/// small active sets (degrades to quadratic / linear / constant / zero fill),
/// so the optimizer can explore the whole box.
inline Eigen::VectorXd reconstruct(const Eigen::VectorXd& z, const SensorWeights& w,
                                   const Grid& g, const ReconstructionSpec& spec) {
  if (z.size() != g.c()) throw std::invalid_argument("reconstruct: state length mismatch");
  if (w.c() != g.c()) throw std::invalid_argument("reconstruct: weight length mismatch");
  if ((spec.method == ReconMethod::CubicSpline1D) != (g.dim == 1))
    throw std::invalid_argument("reconstruct: method does not match grid dimension");

  std::vector<int> active = active_set(w);
  if (spec.boundary_anchor) {
    std::vector<int> corners;
    if (g.dim == 1) {
      corners = {0, g.c() - 1};
    } else {
      corners = {g.idx(0, 0), g.idx(g.nx() - 1, 0), g.idx(0, g.ny() - 1),
                 g.idx(g.nx() - 1, g.ny() - 1)};
    }
    for (int cidx : corners)
      if (!std::binary_search(active.begin(), active.end(), cidx)) active.push_back(cidx);
    std::sort(active.begin(), active.end());
  }

  if (static_cast<int>(active.size()) == g.c()) return z;  // full coverage: exact identity
  return g.dim == 1 ? detail::reconstruct_1d(z, active, g)
                    : detail::reconstruct_2d(z, active, g);
}

}  // namespace sensopt
