#include <catch_amalgamated.hpp>

#include <vector>

#include "sensopt/reconstruct.hpp"
#include "sensopt/rng.hpp"

using namespace sensopt;

namespace {

Eigen::VectorXd random_vec(int c, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd z(c);
  for (int i = 0; i < c; ++i) z(i) = rng.uniform(-1, 1);
  return z;
}

SensorWeights weights_from_active(int c, const std::vector<int>& active) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(c);
  for (int a : active) w(a) = 1.0;
  return SensorWeights{w};
}

}  // namespace

TEST_CASE("active sensor readings pass through bit-identically", "[reconstruct]") {
  const Grid g = build_grid(1.0, 31);
  const Eigen::VectorXd z = random_vec(31, 5);
  for (const std::vector<int>& active :
       {std::vector<int>{4}, {4, 20}, {2, 15, 28}, {0, 7, 13, 22, 30}}) {
    const Eigen::VectorXd r =
        reconstruct(z, weights_from_active(31, active), g, {ReconMethod::CubicSpline1D});
    for (int a : active) CHECK(r(a) == z(a));
  }
}

TEST_CASE("full coverage returns the state exactly", "[reconstruct]") {
  const Grid g = build_grid(1.0, 101);
  const Eigen::VectorXd z = random_vec(101, 6);
  const SensorWeights w{Eigen::VectorXd::Ones(101)};
  const Eigen::VectorXd r = reconstruct(z, w, g, {ReconMethod::CubicSpline1D});
  for (int i = 0; i < 101; ++i) CHECK(r(i) == z(i));

  const Grid g2 = build_grid({1.0, 1.0}, {8, 8});
  const Eigen::VectorXd z2 = random_vec(g2.c(), 7);
  const Eigen::VectorXd r2 = reconstruct(
      z2, SensorWeights{Eigen::VectorXd::Ones(g2.c())}, g2, {ReconMethod::BilinearGrid2D});
  for (int i = 0; i < g2.c(); ++i) CHECK(r2(i) == z2(i));
}

TEST_CASE("small active sets degrade zero / constant / linear / quadratic", "[reconstruct]") {
  const Grid g = build_grid(1.0, 21);
  const Eigen::VectorXd z = random_vec(21, 8);
  const ReconstructionSpec spec{ReconMethod::CubicSpline1D};

  const Eigen::VectorXd r0 = reconstruct(z, weights_from_active(21, {}), g, spec);
  CHECK(r0.isZero(0.0));

  const Eigen::VectorXd r1 = reconstruct(z, weights_from_active(21, {9}), g, spec);
  for (int i = 0; i < 21; ++i) CHECK(r1(i) == z(9));

  // Two sensors: the exact line through them, extended beyond both.
  const Eigen::VectorXd r2 = reconstruct(z, weights_from_active(21, {5, 15}), g, spec);
  const double slope = (z(15) - z(5)) / (g.x(15) - g.x(5));
  for (int i = 0; i < 21; ++i)
    CHECK(r2(i) == Catch::Approx(z(5) + slope * (g.x(i) - g.x(5))).margin(1e-13));

  // Three sensors: quadratic, checked against a linear function which it must
  // reproduce when the readings are collinear.
  Eigen::VectorXd lin(21);
  for (int i = 0; i < 21; ++i) lin(i) = 0.7 - 1.3 * g.x(i);
  const Eigen::VectorXd r3 = reconstruct(lin, weights_from_active(21, {2, 9, 17}), g, spec);
  for (int i = 0; i < 21; ++i) CHECK(r3(i) == Catch::Approx(lin(i)).margin(1e-12));
}

TEST_CASE("four or more sensors reproduce cubics on the whole grid", "[reconstruct]") {
  const Grid g = build_grid(1.0, 41);
  Eigen::VectorXd z(41);
  for (int i = 0; i < 41; ++i) {
    const double x = g.x(i);
    z(i) = 1.0 + x - 2.0 * x * x + 0.5 * x * x * x;
  }
  const Eigen::VectorXd r =
      reconstruct(z, weights_from_active(41, {3, 12, 24, 33, 39}), g,
                  {ReconMethod::CubicSpline1D});
  for (int i = 0; i < 41; ++i) CHECK(r(i) == Catch::Approx(z(i)).margin(1e-10));
}

TEST_CASE("reconstruction depends on omega only through the active set", "[reconstruct]") {
  const Grid g = build_grid(1.0, 21);
  const Eigen::VectorXd z = random_vec(21, 9);
  Eigen::VectorXd w1 = Eigen::VectorXd::Zero(21), w2 = Eigen::VectorXd::Zero(21);
  // Same active set {4, 10, 16}, different weight values.
  w1(4) = 0.5; w1(10) = 0.8; w1(16) = 1.0; w1(2) = 0.49;
  w2(4) = 1.0; w2(10) = 0.6; w2(16) = 0.51; w2(7) = 0.1;
  const Eigen::VectorXd r1 = reconstruct(z, SensorWeights{w1}, g, {ReconMethod::CubicSpline1D});
  const Eigen::VectorXd r2 = reconstruct(z, SensorWeights{w2}, g, {ReconMethod::CubicSpline1D});
  for (int i = 0; i < 21; ++i) CHECK(r1(i) == r2(i));
}

TEST_CASE("2d reconstruction is exact on bilinear fields over sensor rectangles",
          "[reconstruct]") {
  const Grid g = build_grid({1.0, 1.0}, {9, 9});
  Eigen::VectorXd z(g.c());
  for (int iy = 0; iy < 9; ++iy)
    for (int ix = 0; ix < 9; ++ix)
      z(g.idx(ix, iy)) = 0.3 + 1.1 * g.x(ix) - 0.7 * g.y(iy) + 2.0 * g.x(ix) * g.y(iy);

  // Sensors at the four corners of the [2,6] x [2,6] index rectangle.
  const std::vector<int> active = {g.idx(2, 2), g.idx(6, 2), g.idx(2, 6), g.idx(6, 6)};
  const Eigen::VectorXd r =
      reconstruct(z, weights_from_active(g.c(), active), g, {ReconMethod::BilinearGrid2D});
  for (int iy = 2; iy <= 6; ++iy)
    for (int ix = 2; ix <= 6; ++ix)
      CHECK(r(g.idx(ix, iy)) == Catch::Approx(z(g.idx(ix, iy))).margin(1e-12));

  // Constant extension beyond the outermost sensor lines.
  CHECK(r(g.idx(0, 4)) == Catch::Approx(r(g.idx(2, 4))).margin(1e-12));
  CHECK(r(g.idx(8, 4)) == Catch::Approx(r(g.idx(6, 4))).margin(1e-12));
  CHECK(r(g.idx(4, 0)) == Catch::Approx(r(g.idx(4, 2))).margin(1e-12));
  CHECK(r(g.idx(4, 8)) == Catch::Approx(r(g.idx(4, 6))).margin(1e-12));
}

TEST_CASE("2d single sensor fills the plane with its reading", "[reconstruct]") {
  const Grid g = build_grid({1.0, 1.0}, {6, 6});
  const Eigen::VectorXd z = random_vec(g.c(), 10);
  const Eigen::VectorXd r = reconstruct(z, weights_from_active(g.c(), {g.idx(3, 2)}), g,
                                        {ReconMethod::BilinearGrid2D});
  for (int i = 0; i < g.c(); ++i) CHECK(r(i) == z(g.idx(3, 2)));
}

TEST_CASE("boundary anchor adds the domain corners to the support", "[reconstruct]") {
  const Grid g = build_grid(1.0, 21);
  const Eigen::VectorXd z = random_vec(21, 11);
  const ReconstructionSpec anchored{ReconMethod::CubicSpline1D, true};
  const Eigen::VectorXd r = reconstruct(z, weights_from_active(21, {8, 12}), g, anchored);
  CHECK(r(0) == z(0));
  CHECK(r(20) == z(20));
  // Interior sensors still pass through.
  CHECK(r(8) == z(8));
  CHECK(r(12) == z(12));
}

TEST_CASE("method and dimension must agree", "[reconstruct]") {
  const Grid g1 = build_grid(1.0, 11);
  const Grid g2 = build_grid({1.0, 1.0}, {5, 5});
  const Eigen::VectorXd z1 = Eigen::VectorXd::Zero(11);
  const Eigen::VectorXd z2 = Eigen::VectorXd::Zero(25);
  const SensorWeights w1{Eigen::VectorXd::Ones(11)};
  const SensorWeights w2{Eigen::VectorXd::Ones(25)};
  CHECK_THROWS_AS(reconstruct(z1, w1, g1, {ReconMethod::BilinearGrid2D}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reconstruct(z2, w2, g2, {ReconMethod::CubicSpline1D}),
                  std::invalid_argument);
  CHECK_THROWS_AS(reconstruct(z1, w2, g1, {ReconMethod::CubicSpline1D}),
                  std::invalid_argument);
}
