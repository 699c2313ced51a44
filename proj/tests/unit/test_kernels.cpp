#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "twophoton/kernels.hpp"

using namespace twophoton;
using Catch::Approx;

TEST_CASE("absorption kernel values") {
  PhysicalParams p;
  CHECK(eval_abs_kernel(0.0, 0.0, p) == -2.0);
  CHECK(eval_abs_kernel(1.0, 0.0, p) == 0.0);
  CHECK(eval_abs_kernel(-1.0, 0.0, p) == Approx(-0.73575888234288464).epsilon(1e-15));
  PhysicalParams q(2.0, 0.5);  // rate 4
  CHECK(eval_abs_kernel(-0.25, 0.0, q) == Approx(-8.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(eval_abs_kernel(-1.0f, 0.0f, p) == Approx(-0.735759f).epsilon(1e-6));
}

TEST_CASE("nonlinear kernel values") {
  PhysicalParams p;
  CHECK(eval_nonlin_kernel(0.0, 0.0, 0.0, 0.0, p) == 0.0);
  CHECK(eval_nonlin_kernel(-1.0, -1.0, 0.0, 0.0, p) == Approx(-0.54134113294645077).epsilon(1e-15));
  CHECK(eval_nonlin_kernel(-1.0, 1.0, 0.0, 2.0, p) == 0.0);
}

TEST_CASE("kernels reject non-finite positions") {
  PhysicalParams p;
  CHECK_THROWS_AS(eval_abs_kernel(std::nan(""), 0.0, p), std::invalid_argument);
  CHECK_THROWS_AS(eval_abs_kernel(0.0, HUGE_VAL, p), std::invalid_argument);
  CHECK_THROWS_AS(eval_nonlin_kernel(0.0, 0.0, 0.0, std::nan(""), p), std::invalid_argument);
}

TEST_CASE("kernel symmetries, translation invariance and sign on random samples") {
  PhysicalParams p(1.3, 0.9);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> pos(-10.0, 10.0), shift(-50.0, 50.0);
  for (int n = 0; n < 10000; ++n) {
    const double x1 = pos(rng), x2 = pos(rng), a = pos(rng), b = pos(rng), s = shift(rng);
    const double k = eval_nonlin_kernel(x1, x2, a, b, p);
    REQUIRE(k == eval_nonlin_kernel(x2, x1, a, b, p));
    REQUIRE(k == eval_nonlin_kernel(x1, x2, b, a, p));
    REQUIRE(k <= 0.0);
    REQUIRE(std::abs(eval_nonlin_kernel(x1 + s, x2 + s, a + s, b + s, p) - k) <= 1e-13 * std::abs(k));
    const double u = eval_abs_kernel(x1, a, p);
    REQUIRE(u <= 0.0);
    REQUIRE(std::abs(u) <= 2.0 * p.rate());
    REQUIRE(std::abs(eval_abs_kernel(x1 + s, a + s, p) - u) <= 1e-13 * std::abs(u));
  }
}
