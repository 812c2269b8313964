#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>

namespace sensopt {

/// Uniform 1D or 2D mesh over [0, extent] per axis with trapezoidal
/// quadrature weights. 2D states are stored row-major: idx = iy * nx + ix.
struct Grid {
  int dim = 1;
  std::array<int, 2> n = {0, 1};          // points per axis; n[1] = 1 in 1D
  std::array<double, 2> extent = {1, 1};  // domain length per axis
  std::array<double, 2> h = {0, 0};       // spacing = extent / (n - 1)
  Eigen::VectorXd quad;                   // length c; sums to the domain measure

  int c() const { return n[0] * n[1]; }
  int nx() const { return n[0]; }
  int ny() const { return n[1]; }

  double x(int ix) const { return ix * h[0]; }
  double y(int iy) const { return iy * h[1]; }
  int idx(int ix, int iy) const { return iy * n[0] + ix; }
};

namespace detail {

inline Eigen::VectorXd trapezoid_weights(int n, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  w(0) = h / 2;
  w(n - 1) = h / 2;
  return w;
}

}  // namespace detail

inline Grid build_grid(double extent, int n_points) {
  if (n_points < 2) throw std::invalid_argument("grid: need at least 2 points per axis");
  if (extent <= 0) throw std::invalid_argument("grid: extent must be positive");
  Grid g;
  g.dim = 1;
  g.n = {n_points, 1};
  g.extent = {extent, 1};
  g.h = {extent / (n_points - 1), 0};
  g.quad = detail::trapezoid_weights(n_points, g.h[0]);
  return g;
}

inline Grid build_grid(std::array<double, 2> extent, std::array<int, 2> n_points) {
  if (n_points[0] < 2 || n_points[1] < 2)
    throw std::invalid_argument("grid: need at least 2 points per axis");
  if (extent[0] <= 0 || extent[1] <= 0)
    throw std::invalid_argument("grid: extent must be positive");
  Grid g;
  g.dim = 2;
  g.n = n_points;
  g.extent = extent;
  g.h = {extent[0] / (n_points[0] - 1), extent[1] / (n_points[1] - 1)};
  // Tensor product of the per-axis trapezoidal weights, row-major.
  Eigen::VectorXd wx = detail::trapezoid_weights(n_points[0], g.h[0]);
  Eigen::VectorXd wy = detail::trapezoid_weights(n_points[1], g.h[1]);
  g.quad.resize(g.c());
  for (int iy = 0; iy < n_points[1]; ++iy)
    for (int ix = 0; ix < n_points[0]; ++ix) g.quad(g.idx(ix, iy)) = wx(ix) * wy(iy);
  return g;
}

}  // namespace sensopt
