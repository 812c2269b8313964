#include <catch_amalgamated.hpp>

#include "sensopt/grid.hpp"
#include "sensopt/initial_condition.hpp"

using namespace sensopt;

TEST_CASE("1D grid spacing and weights", "[grid]") {
  const Grid g = build_grid(1.0, 101);
  CHECK(g.c() == 101);
  CHECK(g.h[0] == Catch::Approx(1e-2).epsilon(1e-14));
  CHECK(g.quad(0) == Catch::Approx(g.h[0] / 2));
  CHECK(g.quad(50) == Catch::Approx(g.h[0]));
  CHECK(g.quad(100) == Catch::Approx(g.h[0] / 2));
  CHECK(g.quad.sum() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-point grid is the single trapezoid", "[grid]") {
  const Grid g = build_grid(1.0, 2);
  CHECK(g.quad(0) == 0.5);
  CHECK(g.quad(1) == 0.5);
  CHECK(g.quad.sum() == 1.0);
}

TEST_CASE("degenerate grids are rejected", "[grid]") {
  CHECK_THROWS_AS(build_grid(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_grid({1.0, 1.0}, {34, 1}), std::invalid_argument);
}

TEST_CASE("2D weights are the tensor product of 1D weights", "[grid]") {
  const Grid g = build_grid({1.0, 1.0}, {34, 34});
  CHECK(g.c() == 34 * 34);
  CHECK(g.h[0] == Catch::Approx(1.0 / 33).epsilon(1e-14));
  CHECK(g.quad.sum() == Catch::Approx(1.0).epsilon(1e-12));

  const Grid gx = build_grid(1.0, 34);
  for (int iy : {0, 7, 33})
    for (int ix : {0, 12, 33})
      CHECK(g.quad(g.idx(ix, iy)) == gx.quad(ix) * gx.quad(iy));

  // quad applied to the constant-1 field equals the domain measure
  const Grid grect = build_grid({2.0, 3.0}, {11, 7});
  CHECK(grect.quad.sum() == Catch::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("polynomial initial conditions vanish at their roots", "[grid]") {
  const Grid g = build_grid(1.0, 101);
  const Eigen::VectorXd u = eval_initial_condition({IcKind::Poly1DHalf}, g);
  CHECK(u(0) == 0.0);    // x = 0
  CHECK(u(50) == 0.0);   // x = 1/2
  CHECK(u(100) == 0.0);  // x = 1
}

TEST_CASE("Heaviside resolves the tie at 1/2 to one", "[grid]") {
  const Grid g = build_grid(1.0, 101);
  const Eigen::VectorXd u = eval_initial_condition({IcKind::HeavisideHalf}, g);
  for (int i = 0; i < 50; ++i) CHECK(u(i) == 0.0);
  for (int i = 50; i < 101; ++i) CHECK(u(i) == 1.0);
}

TEST_CASE("normalization divides by the continuous maximum", "[grid]") {
  // Oracle: dense scan of the raw formula at 1e-6 resolution.
  auto raw = [](double x) {
    return x * x * (x - 1) * (x - 1) * (x - 0.5) * (x - 0.5);
  };
  double raw_max = 0;
  for (int i = 0; i <= 1000000; ++i) raw_max = std::max(raw_max, raw(i * 1e-6));

  const Grid g = build_grid(1.0, 101);
  const Eigen::VectorXd u = eval_initial_condition({IcKind::Poly1DHalf}, g);
  const Eigen::VectorXd u_raw = eval_initial_condition({IcKind::Poly1DHalf, false}, g);
  CHECK(u.maxCoeff() == Catch::Approx(u_raw.maxCoeff() / raw_max).epsilon(1e-12));
  CHECK(u.maxCoeff() <= 1.0 + 1e-12);
  CHECK(u.maxCoeff() == Catch::Approx(1.0).margin(1e-3));  // argmax sits close to a node
  CHECK(u.minCoeff() >= 0.0);
}

TEST_CASE("2D initial condition peaks at the center with max 1", "[grid]") {
  // x^2 y^2 (x-1)^2 (y-1)^2 has continuous maximum (1/16)^2 at (1/2, 1/2).
  const Grid g = build_grid({1.0, 1.0}, {33, 33});  // odd count puts a node at 1/2
  const Eigen::VectorXd u = eval_initial_condition({IcKind::Poly2D}, g);
  CHECK(u(g.idx(16, 16)) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(u.maxCoeff() <= 1.0 + 1e-12);
  CHECK(u.minCoeff() >= 0.0);
  const Eigen::VectorXd u_raw = eval_initial_condition({IcKind::Poly2D, false}, g);
  CHECK(u_raw(g.idx(16, 16)) == Catch::Approx(1.0 / 256).epsilon(1e-12));
}

TEST_CASE("initial condition dimension must match the grid", "[grid]") {
  CHECK_THROWS_AS(eval_initial_condition({IcKind::Poly2D}, build_grid(1.0, 11)),
                  std::invalid_argument);
  CHECK_THROWS_AS(eval_initial_condition({IcKind::Poly1DHalf}, build_grid({1., 1.}, {5, 5})),
                  std::invalid_argument);
}
