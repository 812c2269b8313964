#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace sensopt {

/// Cubic interpolating spline with not-a-knot end conditions.
///
/// Solves for the knot second derivatives sigma_j: the two not-a-knot rows
/// (third derivative continuous across the first and last interior knots) are
/// eliminated into their neighbours, leaving a tridiagonal system solved by
/// the Thomas algorithm in O(m). Evaluation outside [x_0, x_{m-1}] extends
/// the boundary polynomials.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> xs, std::vector<double> ys)
      : xs_(std::move(xs)), ys_(std::move(ys)) {
    const int m = static_cast<int>(xs_.size());
    if (m < 4) throw std::invalid_argument("cubic spline needs at least 4 points");
    if (ys_.size() != xs_.size()) throw std::invalid_argument("spline: size mismatch");
    for (int j = 0; j + 1 < m; ++j)
      if (!(xs_[j] < xs_[j + 1]))
        throw std::invalid_argument("spline: abscissae must be strictly increasing");

    std::vector<double> hs(m - 1);
    for (int j = 0; j + 1 < m; ++j) hs[j] = xs_[j + 1] - xs_[j];

    // Reduced system in sigma_1..sigma_{m-2}.
    const int n = m - 2;
    std::vector<double> sub(n), diag(n), sup(n), rhs(n);
    for (int jj = 0; jj < n; ++jj) {
      const int j = jj + 1;
      sub[jj] = hs[j - 1];
      diag[jj] = 2 * (hs[j - 1] + hs[j]);
      sup[jj] = hs[j];
      rhs[jj] = 6 * ((ys_[j + 1] - ys_[j]) / hs[j] - (ys_[j] - ys_[j - 1]) / hs[j - 1]);
    }
    // Not-a-knot: sigma_0 = ((h0 + h1) sigma_1 - h0 sigma_2) / h1, and the
    // mirrored relation at the right end; substitute into the boundary rows.
    diag[0] += sub[0] * (hs[0] + hs[1]) / hs[1];
    sup[0] -= sub[0] * hs[0] / hs[1];
    sub[0] = 0;
    diag[n - 1] += sup[n - 1] * (hs[m - 2] + hs[m - 3]) / hs[m - 3];
    sub[n - 1] -= sup[n - 1] * hs[m - 2] / hs[m - 3];
    sup[n - 1] = 0;

    for (int i = 1; i < n; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    sigma_.assign(m, 0.0);
    sigma_[n] = rhs[n - 1] / diag[n - 1];
    for (int i = n - 2; i >= 0; --i)
      sigma_[i + 1] = (rhs[i] - sup[i] * sigma_[i + 2]) / diag[i];
    sigma_[0] = ((hs[0] + hs[1]) * sigma_[1] - hs[0] * sigma_[2]) / hs[1];
    sigma_[m - 1] =
        ((hs[m - 2] + hs[m - 3]) * sigma_[m - 2] - hs[m - 2] * sigma_[m - 3]) / hs[m - 3];
  }

  double operator()(double xq) const {
    const int m = static_cast<int>(xs_.size());
    int j = static_cast<int>(std::upper_bound(xs_.begin(), xs_.end(), xq) - xs_.begin()) - 1;
    j = std::clamp(j, 0, m - 2);
    const double h = xs_[j + 1] - xs_[j];
    const double t = xq - xs_[j];
    const double b =
        (ys_[j + 1] - ys_[j]) / h - h * (2 * sigma_[j] + sigma_[j + 1]) / 6;
    return ys_[j] + b * t + sigma_[j] / 2 * t * t +
           (sigma_[j + 1] - sigma_[j]) / (6 * h) * t * t * t;
  }

  /// Knot second derivatives; exposed for continuity checks.
  const std::vector<double>& sigma() const { return sigma_; }

 private:
  std::vector<double> xs_, ys_;
  std::vector<double> sigma_;
};

}  // namespace sensopt
