#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "sensopt/rng.hpp"
#include "sensopt/spline.hpp"

using namespace sensopt;

namespace {

// Independent oracle: assemble the full m x m not-a-knot system (two
// third-derivative continuity rows plus the m-2 second-derivative continuity
// rows) and solve it densely.
std::vector<double> sigma_dense(const std::vector<double>& xs, const std::vector<double>& ys) {
  const int m = static_cast<int>(xs.size());
  std::vector<double> hs(m - 1);
  for (int j = 0; j + 1 < m; ++j) hs[j] = xs[j + 1] - xs[j];

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  A(0, 0) = -hs[1];
  A(0, 1) = hs[0] + hs[1];
  A(0, 2) = -hs[0];
  for (int j = 1; j + 1 < m; ++j) {
    A(j, j - 1) = hs[j - 1];
    A(j, j) = 2 * (hs[j - 1] + hs[j]);
    A(j, j + 1) = hs[j];
    b(j) = 6 * ((ys[j + 1] - ys[j]) / hs[j] - (ys[j] - ys[j - 1]) / hs[j - 1]);
  }
  A(m - 1, m - 3) = -hs[m - 2];
  A(m - 1, m - 2) = hs[m - 3] + hs[m - 2];
  A(m - 1, m - 1) = -hs[m - 3];

  const Eigen::VectorXd s = A.fullPivLu().solve(b);
  return std::vector<double>(s.data(), s.data() + m);
}

}  // namespace

TEST_CASE("knot second derivatives match a dense solve", "[spline]") {
  Rng rng(314);
  for (int m : {4, 5, 9, 17, 40}) {
    // Nonuniform abscissae with random gaps.
    std::vector<double> xs(m), ys(m);
    double x = 0.0;
    for (int j = 0; j < m; ++j) {
      xs[j] = x;
      x += rng.uniform(0.2, 1.5);
      ys[j] = rng.uniform(-2, 2);
    }
    const CubicSpline s(xs, ys);
    const std::vector<double> want = sigma_dense(xs, ys);
    for (int j = 0; j < m; ++j)
      CHECK(s.sigma()[j] == Catch::Approx(want[j]).margin(1e-9).epsilon(1e-9));
  }
}

TEST_CASE("interpolates the data", "[spline]") {
  Rng rng(99);
  std::vector<double> xs, ys;
  for (int j = 0; j < 12; ++j) {
    xs.push_back(j * 0.3 + 0.05 * rng.uniform());
    ys.push_back(rng.uniform(-1, 1));
  }
  const CubicSpline s(xs, ys);
  for (std::size_t j = 0; j < xs.size(); ++j)
    CHECK(s(xs[j]) == Catch::Approx(ys[j]).margin(1e-12));
}

TEST_CASE("reproduces cubic polynomials exactly, including extrapolation", "[spline]") {
  // Not-a-knot is exact on cubics; the boundary-polynomial extension keeps
  // that exactness outside the data interval.
  auto p = [](double x) { return 2.0 - x + 0.5 * x * x - 0.25 * x * x * x; };
  std::vector<double> xs = {0.0, 0.3, 0.55, 0.7, 1.0, 1.4};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(p(x));
  const CubicSpline s(xs, ys);
  for (double xq = -0.5; xq <= 2.0; xq += 0.01)
    CHECK(s(xq) == Catch::Approx(p(xq)).margin(1e-12));
}

TEST_CASE("four points give the unique interpolating cubic", "[spline]") {
  const std::vector<double> xs = {0.0, 0.4, 0.9, 1.0};
  const std::vector<double> ys = {1.0, -0.5, 0.25, 2.0};
  const CubicSpline s(xs, ys);

  // Solve the Vandermonde system for the cubic through the four points.
  Eigen::Matrix4d V;
  Eigen::Vector4d rhs;
  for (int j = 0; j < 4; ++j) {
    V(j, 0) = 1;
    V(j, 1) = xs[j];
    V(j, 2) = xs[j] * xs[j];
    V(j, 3) = xs[j] * xs[j] * xs[j];
    rhs(j) = ys[j];
  }
  const Eigen::Vector4d c = V.fullPivLu().solve(rhs);
  for (double xq = -0.2; xq <= 1.2; xq += 0.01) {
    const double want = c(0) + c(1) * xq + c(2) * xq * xq + c(3) * xq * xq * xq;
    CHECK(s(xq) == Catch::Approx(want).margin(1e-10));
  }
}

TEST_CASE("value and first two derivatives are continuous at the knots", "[spline]") {
  Rng rng(7);
  std::vector<double> xs, ys;
  for (int j = 0; j < 10; ++j) {
    xs.push_back(static_cast<double>(j));
    ys.push_back(rng.uniform(-3, 3));
  }
  const CubicSpline s(xs, ys);
  const double eps = 1e-4;
  for (int j = 1; j < 9; ++j) {
    const double x = xs[j];
    // Central second differences from each side agree when s is C^2.
    const double left = (s(x - 2 * eps) - 2 * s(x - eps) + s(x)) / (eps * eps);
    const double right = (s(x) - 2 * s(x + eps) + s(x + 2 * eps)) / (eps * eps);
    CHECK(left == Catch::Approx(s.sigma()[j]).margin(5e-3));
    CHECK(right == Catch::Approx(s.sigma()[j]).margin(5e-3));
  }
}

TEST_CASE("rejects malformed input", "[spline]") {
  CHECK_THROWS_AS(CubicSpline({0, 1, 2}, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(CubicSpline({0, 1, 1, 2}, {0, 1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(CubicSpline({0, 2, 1, 3}, {0, 1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(CubicSpline({0, 1, 2, 3}, {0, 1, 2}), std::invalid_argument);
}
