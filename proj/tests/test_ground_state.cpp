#include <cmath>

#include "doctest.h"
#include "mfg/diagnostics.hpp"
#include "mfg/error.hpp"
#include "mfg/fokker_planck.hpp"
#include "mfg/ground_state.hpp"

using namespace mfg;

namespace {

ProblemSpec quadratic_spec(int N = 513) {
  ProblemSpec s;
  s.ham = HamiltonianSpec::make(2, 1);
  s.N = N;
  s.potential = PotentialSpec::polynomial(2);
  return s;
}

ProblemSpec free_spec(int N) {
  ProblemSpec s = quadratic_spec(N);
  s.potential = PotentialSpec::zero();
  return s;
}

double rel_l1(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size()), bb(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = std::abs(a[i] - b[i]);
  for (auto& v : bb) v = std::abs(v);
  return integrate(g, d) / integrate(g, bb);
}

const double kMStar = std::sqrt(3.0) * M_PI / 2.0;

}  // namespace

TEST_CASE("small mass in a quadratic well is the linear Gaussian") {
  const ProblemSpec s = quadratic_spec();
  const double M = 1e-3;
  const MfgSolution sol = solve_mfg(s, M);
  REQUIRE(sol.converged);
  const Grid& g = sol.grid();
  auto lin = ScalarField::from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  const double z = integrate(g, lin.values());
  std::vector<double> ref(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) ref[i] = M * lin[i] / z;
  CHECK(rel_l1(g, sol.pair.m().values(), ref) <= 0.02);
  CHECK(std::abs(sol.lambda - 1.0) <= 0.02);
  CHECK(std::abs(sol.mass() - M) <= 1e-12);
}

TEST_CASE("subcritical potential-free ground state has negative lambda") {
  ProblemSpec s = free_spec(513);
  s.alpha_critical = false;
  s.alpha_value = 1.0;
  // Cubic NLS soliton of mass 4 has lambda = -1.
  const MfgSolution sol = potential_free_ground(s, 4.0);
  REQUIRE(sol.converged);
  CHECK(sol.lambda < 0.0);
  CHECK(std::abs(sol.lambda + 1.0) <= 0.01);
  CHECK(sol.potential_free);
  CHECK(std::abs(sol.mass() - 4.0) <= 1e-9);
}

TEST_CASE("warm start and re-solve from own output") {
  const ProblemSpec s = quadratic_spec();
  const MfgSolution a = solve_mfg(s, 1.0);
  REQUIRE(a.converged);
  const MfgSolution cold = solve_mfg(s, 1.05);
  const MfgSolution warm = solve_mfg(s, 1.05, a.pair);
  REQUIRE(cold.converged);
  REQUIRE(warm.converged);
  CHECK(warm.iterations <= cold.iterations);
  CHECK(std::abs(warm.lambda - cold.lambda) <= 1e-7);

  const MfgSolution again = solve_mfg(s, 1.0, a.pair);
  CHECK(again.converged);
  CHECK(again.iterations <= 2);
}

TEST_CASE("converged solution satisfies the weak Fokker-Planck relation") {
  const ProblemSpec s = quadratic_spec();
  const MfgSolution sol = solve_mfg(s, 1.5);
  REQUIRE(sol.converged);
  const std::vector<TestFunction> tests{TestFunction::bump({0.0, 0.0}, 2.0), TestFunction::bump({0.5, 0.0}, 1.0),
                                        TestFunction::bump({-1.0, 0.0}, 3.0)};
  CHECK(fp_weak_residual(sol.pair.m(), sol.pair.w(), tests) <= 10.0 * sol.grid().h);
  const auto V = potential_field(s.potential, sol.grid());
  const auto gb = gradient_bound_check(sol.u, V, s.ham);
  CHECK(std::isfinite(gb.constant));
  CHECK(gb.constant > 0.0);
}

TEST_CASE("critical potential-free ground state") {
  const MfgSolution coarse = potential_free_ground(free_spec(513), 1.0);
  const MfgSolution fine = potential_free_ground(free_spec(1025), 1.0);
  REQUIRE(coarse.converged);
  REQUIRE(fine.converged);
  CHECK(std::abs(fine.mass() - kMStar) / kMStar <= 5e-3);

  const auto pc = pohozaev_residuals(coarse, coarse.alpha, coarse.ham);
  const auto pf = pohozaev_residuals(fine, fine.alpha, fine.ham);
  CHECK(std::abs(pf.res1) < std::abs(pc.res1));
  CHECK(std::abs(pf.res2) < std::abs(pc.res2));

  const Grid& g = fine.grid();
  const auto& m = fine.pair.m().values();
  const double mmax = *std::max_element(m.begin(), m.end());
  double asym = 0.0, band = 0.0;
  for (int i = 0; i < g.N; ++i) {
    asym = std::max(asym, std::abs(m[i] - m[g.N - 1 - i]));
    if (std::abs(g.point(i)[0]) >= 0.9 * g.L) band = std::max(band, m[i]);
  }
  CHECK(asym <= 1e-6 * mmax);
  CHECK(band <= 1e-8 * mmax);
  CHECK(std::abs(centroid(g, m)[0]) <= 1e-9);
}

TEST_CASE("center_density preserves mass") {
  const Grid g = make_grid(1, 8, 257);
  auto m = ScalarField::from_function(g, [](const Point& x) { return std::exp(-(x[0] - 0.7) * (x[0] - 0.7)); });
  const auto c = center_density(g, m.values());
  CHECK(integrate(g, c) == doctest::Approx(integrate(g, m.values())).epsilon(1e-12));
  CHECK(std::abs(centroid(g, c)[0]) < 1e-3);
}

TEST_CASE("continuation sweep") {
  const ProblemSpec s = quadratic_spec();
  const SweepResult empty = continuation_sweep(s, {});
  CHECK(empty.entries.empty());
  CHECK_FALSE(empty.aborted);

  std::vector<double> masses;
  for (double f : {0.9, 0.93, 0.95}) masses.push_back(f * kMStar);
  const SweepResult sw = continuation_sweep(s, masses);
  REQUIRE_FALSE(sw.aborted);
  REQUIRE(sw.entries.size() == 3);
  for (std::size_t i = 1; i < sw.entries.size(); ++i) {
    CHECK(sw.entries[i].report.epsilon < sw.entries[i - 1].report.epsilon);
    CHECK(sw.entries[i].solution.energy < sw.entries[i - 1].solution.energy);
    CHECK(sw.entries[i].solution.energy > 0.0);
  }
}

TEST_CASE("sweep stops cleanly when the core is under-resolved") {
  ProblemSpec s = quadratic_spec(65);
  const SweepResult sw = continuation_sweep(s, {1.0, 0.99 * kMStar});
  CHECK(sw.aborted);
  CHECK(sw.abort_index == 1);
  CHECK(sw.entries.size() == 1);
  CHECK_FALSE(sw.abort_reason.empty());
}

TEST_CASE("iteration cap raises DivergedError with history") {
  ProblemSpec s = quadratic_spec();
  s.tol.max_iter = 2;
  try {
    (void)solve_mfg(s, 2.0);
    FAIL("expected DivergedError");
  } catch (const DivergedError& e) {
    CHECK_FALSE(e.history().empty());
  }
}

TEST_CASE("NLS oracle") {
  ProblemSpec s = quadratic_spec();
  s.ham = HamiltonianSpec::make(3, 1);
  CHECK_THROWS_AS(nls_oracle(s, 1.0), UnsupportedError);

  const NlsResult sol = nls_oracle(free_spec(1025), 1.0);
  CHECK(sol.fixed_lambda);
  CHECK(std::abs(sol.mass - kMStar) / kMStar <= 0.01);

  const NlsResult lin = nls_oracle(quadratic_spec(), 1e-3);
  CHECK(std::abs(lin.lambda - 1.0) <= 0.01);
  CHECK(std::abs(lin.mass - 1e-3) <= 1e-12);
  const Grid& g = lin.pair.grid();
  auto gauss = ScalarField::from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  const double z = integrate(g, gauss.values());
  std::vector<double> ref(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) ref[i] = 1e-3 * gauss[i] / z;
  CHECK(rel_l1(g, lin.pair.m().values(), ref) <= 0.01);
}
