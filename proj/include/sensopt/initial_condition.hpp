#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sensopt/grid.hpp"

namespace sensopt {

enum class IcKind { Poly1DHalf, Poly1DQuarter, Poly1DNegHalf, HeavisideHalf, Poly2D };

inline std::string to_string(IcKind k) {
  switch (k) {
    case IcKind::Poly1DHalf: return "poly1d_half";
    case IcKind::Poly1DQuarter: return "poly1d_quarter";
    case IcKind::Poly1DNegHalf: return "poly1d_neg_half";
    case IcKind::HeavisideHalf: return "heaviside_half";
    case IcKind::Poly2D: return "poly2d";
  }
  throw std::logic_error("unreachable");
}

inline IcKind ic_kind_from_string(const std::string& s) {
  if (s == "poly1d_half") return IcKind::Poly1DHalf;
  if (s == "poly1d_quarter") return IcKind::Poly1DQuarter;
  if (s == "poly1d_neg_half") return IcKind::Poly1DNegHalf;
  if (s == "heaviside_half") return IcKind::HeavisideHalf;
  if (s == "poly2d") return IcKind::Poly2D;
  throw std::invalid_argument("unknown initial condition kind: " + s);
}

/// Closed-form initial fields. `normalize` divides by the maximum of the
/// continuous formula over the domain (not the grid maximum), so the field
/// definition does not depend on the mesh.
struct InitialCondition {
  IcKind kind = IcKind::Poly1DHalf;
  bool normalize = true;

  int dim() const { return kind == IcKind::Poly2D ? 2 : 1; }
};

namespace detail {

inline double ic_raw_1d(IcKind k, double x) {
  const double a = x * x * (x - 1) * (x - 1);
  switch (k) {
    case IcKind::Poly1DHalf: return a * (x - 0.5) * (x - 0.5);
    case IcKind::Poly1DQuarter: return a * (x - 0.25) * (x - 0.25);
    case IcKind::Poly1DNegHalf: return a * (x + 0.5) * (x + 0.5);
    case IcKind::HeavisideHalf: return x >= 0.5 ? 1.0 : 0.0;  // tie at 1/2 -> 1
    default: throw std::logic_error("not a 1D initial condition");
  }
}

// Maximum of the continuous formula on [0, extent], dense scan at 1e-6
// resolution. Poly2D factors as g(x) * g(y) with g >= 0, so its maximum is
// the square of the 1D factor's maximum.
inline double ic_continuous_max(IcKind k, double extent) {
  if (k == IcKind::HeavisideHalf) return 1.0;
  const double step = 1e-6;
  const int m = static_cast<int>(std::llround(extent / step));
  auto factor = [&](double x) {
    if (k == IcKind::Poly2D) return x * x * (x - 1) * (x - 1);
    return ic_raw_1d(k, x);
  };
  double best = 0.0;
  for (int i = 0; i <= m; ++i) best = std::max(best, factor(std::min(i * step, extent)));
  return k == IcKind::Poly2D ? best * best : best;
}

}  // namespace detail

inline Eigen::VectorXd eval_initial_condition(const InitialCondition& ic, const Grid& grid) {
  if (ic.dim() != grid.dim)
    throw std::invalid_argument("initial condition dimension does not match grid");
  Eigen::VectorXd u(grid.c());
  if (grid.dim == 1) {
    for (int i = 0; i < grid.c(); ++i) u(i) = detail::ic_raw_1d(ic.kind, grid.x(i));
  } else {
    for (int iy = 0; iy < grid.ny(); ++iy)
      for (int ix = 0; ix < grid.nx(); ++ix) {
        const double x = grid.x(ix), y = grid.y(iy);
        u(grid.idx(ix, iy)) = x * x * y * y * (x - 1) * (x - 1) * (y - 1) * (y - 1);
      }
  }
  if (ic.normalize) {
    const double mx = detail::ic_continuous_max(ic.kind, grid.extent[0]);
    if (mx > 0 && mx != 1.0) u /= mx;
  }
  return u;
}

}  // namespace sensopt
