#include <cmath>
#include <random>

#include "doctest.h"
#include "mfg/error.hpp"
#include "mfg/grid.hpp"
#include "mfg/hamiltonian.hpp"
#include "mfg/potential.hpp"

using namespace mfg;

TEST_CASE("grid spacing and shape") {
  const Grid a = make_grid(1, 8, 17);
  CHECK(a.h == 1.0);
  CHECK(a.coord(0) == -8.0);
  CHECK(a.coord(16) == 8.0);
  CHECK(a.size() == 17);

  const Grid b = make_grid(2, 4, 33);
  CHECK(b.h == 0.25);
  CHECK(b.size() == 33u * 33u);
  CHECK(b.point(b.index(32, 0))[0] == 4.0);
  CHECK(b.point(b.index(32, 0))[1] == -4.0);

  CHECK_THROWS_AS(make_grid(3, 1, 16), ConfigError);
  CHECK_THROWS_AS(make_grid(1, 1, 15), ConfigError);
  CHECK_THROWS_AS(make_grid(1, -1, 32), ConfigError);
}

TEST_CASE("grid coordinates are symmetric") {
  const Grid g = make_grid(1, 8, 1025);
  for (int i = 0; i < g.N; ++i) CHECK(g.coord(i) == -g.coord(g.N - 1 - i));
  CHECK(g.coord(512) == 0.0);
}

TEST_CASE("fields reject bad input") {
  const Grid g = make_grid(1, 1, 16);
  CHECK_THROWS(ScalarField(g, std::vector<double>(15, 0.0)));
  std::vector<double> v(16, 0.0);
  v[3] = NAN;
  CHECK_THROWS(ScalarField(g, v));
}

TEST_CASE("trapezoid quadrature") {
  for (int N : {16, 33, 101}) {
    const Grid g = make_grid(1, 1, N);
    CHECK(integrate(ScalarField::constant(g, 1.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate(ScalarField::constant(g, 0.0)) == 0.0);
    CHECK(std::abs(integrate(ScalarField::from_function(g, [](const Point& x) { return 3.0 * x[0] + 1.0; })) - 2.0) <
          1e-12);
  }
  const Grid g = make_grid(1, 8, 1025);
  const auto gauss = [](const Point& x) { return std::exp(-x[0] * x[0]); };
  CHECK(std::abs(integrate(ScalarField::from_function(g, gauss)) - std::sqrt(M_PI)) < 1e-8);

  const Grid g2 = make_grid(2, 4, 65);
  const double two_d = integrate(ScalarField::from_function(g2, [](const Point& x) {
    return std::exp(-x[0] * x[0] - x[1] * x[1]);
  }));
  CHECK(two_d == doctest::Approx(M_PI * std::erf(4.0) * std::erf(4.0)).epsilon(1e-8));
}

TEST_CASE("quadrature converges at second order") {
  // Domain cut inside the Gaussian tail so the truncation error does not mask the rate.
  auto f = [](const Point& x) { return std::exp(-x[0] * x[0]); };
  const double exact = std::sqrt(M_PI) * std::erf(1.0);
  double prev = 0.0;
  for (int N : {17, 33, 65, 129}) {
    const double err = std::abs(integrate(ScalarField::from_function(make_grid(1, 1, N), f)) - exact);
    if (prev > 0.0) CHECK(prev / err >= 3.5);
    prev = err;
  }
}

TEST_CASE("Hamiltonian values and conjugate constant") {
  const auto ham = HamiltonianSpec::make(2, 1);
  const double p[2] = {3, 4};
  CHECK(h_value(p, ham) == doctest::Approx(25.0));
  CHECK(ham.c_l() == doctest::Approx(0.25));
  CHECK(ham.r() == doctest::Approx(2.0));
  const double q[2] = {1.0, -2.0};
  CHECK(lagrangian(q, ham) == doctest::Approx(5.0 / 4.0));
  // sup_p (q.p - |p|^2) is attained at p = q/2.
  const double ph[2] = {0.5, -1.0};
  CHECK(lagrangian(q, ham) == doctest::Approx(q[0] * ph[0] + q[1] * ph[1] - h_value(ph, ham)));
  const double zero[2] = {0, 0};
  const auto g0 = h_grad(zero, HamiltonianSpec::make(1.5, 2.0));
  CHECK(g0[0] == 0.0);
  CHECK(g0[1] == 0.0);
  CHECK_THROWS_AS(HamiltonianSpec::make(1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(HamiltonianSpec::make(2.0, 0.0), ConfigError);
}

TEST_CASE("Legendre duality, Young and convexity on random samples") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (double rp : {1.3, 1.5, 2.0, 3.0}) {
    const auto ham = HamiltonianSpec::make(rp, 0.7);
    for (int k = 0; k < 1000; ++k) {
      const double p[2] = {U(rng), U(rng)};
      const double q[2] = {U(rng), U(rng)};
      const auto g = h_grad(p, ham);
      const double pn = std::hypot(p[0], p[1]);
      const double lhs = lagrangian(g, ham);
      const double rhs = p[0] * g[0] + p[1] * g[1] - h_value(p, ham);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::pow(pn, rp)));
      CHECK(h_value(p, ham) + lagrangian(q, ham) >= p[0] * q[0] + p[1] * q[1] - 1e-12);
      const double mid[2] = {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
      CHECK(h_value(mid, ham) <= 0.5 * (h_value(p, ham) + h_value(q, ham)) + 1e-12);
    }
  }
}

TEST_CASE("potential evaluation and well table") {
  const auto poly = PotentialSpec::polynomial(2.0);
  CHECK(eval_potential(poly, {2.0, 0.0}) == doctest::Approx(4.0));

  const auto mw = PotentialSpec::multiwell({{{-2, 0}, 1, 2}, {{2, 0}, 1, 4}}, 1.0);
  CHECK(eval_potential(mw, {-2.0, 0.0}) == 0.0);
  CHECK(eval_potential(mw, {2.0, 0.0}) == 0.0);
  CHECK(eval_potential(mw, {2.3, 0.0}) == doctest::Approx(std::pow(0.3, 4)));
  const auto wt = well_table(mw);
  REQUIRE(wt.size() == 2);
  CHECK_FALSE(wt[0].flattest);
  CHECK(wt[1].flattest);
  CHECK(wt[1].q == 4.0);

  const Grid g = make_grid(1, 8, 1025);
  const auto V = potential_field(mw, g);
  CHECK(V.min() >= 0.0);

  CHECK_THROWS_AS(PotentialSpec::multiwell({{{-0.5, 0}, 1, 2}, {{0.5, 0}, 1, 2}}, 1.0).validate(), ConfigError);
}

TEST_CASE("tabulated potential") {
  const auto t = parse_table("# x V\n-1 1\n0 0\n1 3\n", 1);
  const auto V = PotentialSpec::tabulated(t);
  CHECK(eval_potential(V, {0.5, 0}) == doctest::Approx(1.5));
  CHECK(eval_potential(V, {5.0, 0}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(parse_table("0 1\n0 2\n", 1), FormatError);
  CHECK_THROWS_AS(parse_table("0 x\n1 2\n", 1), FormatError);

  const auto t2 = parse_table("0 0 0\n0 1 1\n1 0 2\n1 1 3\n", 2);
  CHECK(eval_potential(PotentialSpec::tabulated(t2), {0.5, 0.5}) == doctest::Approx(1.5));
}

TEST_CASE("structural assumption report") {
  const Grid g = make_grid(1, 8, 257);
  const auto quad = check_assumptions(PotentialSpec::polynomial(2.0), g);
  CHECK(quad.v1);
  CHECK(quad.v2);
  CHECK(quad.v3);

  const auto zero = check_assumptions(PotentialSpec::zero(), g);
  CHECK_FALSE(zero.v2_lower);

  auto tab = std::make_shared<Table>();
  tab->dim = 1;
  for (int i = 0; i <= 400; ++i) {
    const double x = -10.0 + 0.05 * i;
    tab->x0.push_back(x);
    tab->values.push_back(std::exp(std::abs(x)));
  }
  auto spec = PotentialSpec::tabulated(tab);
  spec.growth.delta = 1.0;
  const auto ex = check_assumptions(spec, g);
  CHECK(ex.v2_upper);
  // Linear interpolation between table nodes overshoots e^{|x|} slightly.
  CHECK(ex.upper_c2 <= 1.001);
}
