#include <catch2/catch_amalgamated.hpp>

#include "twophoton/quadrature.hpp"

using namespace twophoton;

namespace {
// integral_x^b exp(-k (t - x)) (alpha + beta t) dt
double exact_tail(double x, double b, double k, double alpha, double beta) {
  auto anti = [&](double t) {  // antiderivative in t of exp(-k (t - x)) (alpha + beta t)
    const double e = std::exp(-k * (t - x));
    return -e * (alpha + beta * t) / k - beta * e / (k * k);
  };
  return anti(b) - anti(x);
}
}  // namespace

TEST_CASE("tail integral of a linear function converges at second order") {
  const double k = 1.5, a = 0.3, b = -0.7;
  Grid1D g(0.0, 2.0, 21);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = a + b * g[i];
  double prev = 0.0;
  for (int m : {1, 2, 4, 8}) {
    TailIntegrator<double> t(g, f, k, m);
    double worst = 0.0;
    for (double x : {0.0, 0.37, 1.0, 1.95}) worst = std::max(worst, std::abs(t(x) - exact_tail(x, 2.0, k, a, b)));
    if (prev > 0.0) CHECK(prev / worst == Catch::Approx(4.0).margin(0.2));
    prev = worst;
  }
}

TEST_CASE("tail integral outside the grid") {
  Grid1D g(0.0, 1.0, 11);
  std::vector<double> f(g.size(), 1.0);
  TailIntegrator<double> t(g, f, 1.0, 4);
  CHECK(t(1.0) == 0.0);
  CHECK(t(5.0) == 0.0);
  CHECK(t(-2.0) == Catch::Approx(std::exp(-2.0) * t(0.0)).epsilon(1e-14));
}

TEST_CASE("refinement stops at the tolerance or the cap") {
  Grid1D g(0.0, 4.0, 41);
  std::vector<cplx> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = cplx(std::sin(g[i]), 1.0);
  std::vector<double> q = {0.0, 1.0, 2.5};
  RefinementReport rep;
  auto v = refined_tail_integrals<cplx>(g, f, 2.0, q, {1e-3, 4}, &rep);
  CHECK(rep.converged);
  CHECK(rep.refinements < 4);
  refined_tail_integrals<cplx>(g, f, 2.0, q, {1e-15, 4}, &rep);
  CHECK(!rep.converged);
  CHECK(rep.refinements == 4);
  CHECK(v.size() == 3);
}

TEST_CASE("zero-width segments at breakpoints carry no weight") {
  const double bps[] = {1.0};
  auto g = Grid1D::aligned(0.0, 2.0, 21, bps);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = (g[i] < 1.0 || g.limit(i) == Limit::left) ? 1.0 : 3.0;
  TailIntegrator<double> t(g, f, 1e-12, 1);  // almost no decay: plain integral
  CHECK(t(0.0) == Catch::Approx(4.0).epsilon(1e-9));
}
