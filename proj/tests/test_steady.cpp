#include <doctest.h>

#include <cmath>

#include "lvhybrid/steady.hpp"

using namespace lvh;

TEST_CASE("steady: constant growth pins the constant state") {
  auto g = Grid::interval(1.0, 33);
  ScalarField one(g, 1.0);
  ScalarField w = solve_logistic_steady(one, 0.1);
  CHECK(sup_diff(w, one) <= 1e-10);
}

TEST_CASE("steady: nonpositive growth collapses to zero") {
  auto g = Grid::interval(1.0, 33);
  CHECK(sup_norm(solve_logistic_steady(ScalarField(g, -1.0), 0.1)) == 0.0);
  CHECK(sup_norm(solve_logistic_steady(sample(parse("0 - x", 1), g), 0.1)) == 0.0);
  // Slightly positive near one wall but subcritical for this diffusion rate.
  CHECK(sup_norm(solve_logistic_steady(sample(parse("0.05 - x", 1), g), 0.1)) == 0.0);
}

TEST_CASE("steady: bundled environment state with small residual") {
  auto g = Grid::interval(1.0, 257);
  Environment env = make_environment(parse("1 + 0.5*cos(pi*x)", 1), g);
  ScalarField w = solve_logistic_steady(env.field, 0.1);
  CHECK(elliptic_residual(w, env.field, 0.1) <= 1e-8);
  CHECK(std::abs(steady_integral_identity(w, env.field)) <= 1e-8);
  CHECK(min_value(w) > 0.0);
  CHECK(sup_norm(w) < env.a_sup - 1e-3);
  CHECK(omega_star_nonempty(w, env.field));

  // Warm start from the solution settles immediately to the same state.
  ScalarField again = solve_logistic_steady(env.field, 0.1, {}, &w);
  CHECK(sup_diff(again, w) <= 1e-10);
}

TEST_CASE("steady: 2-d smoke test") {
  auto g = Grid::rectangle(1.0, 1.0, 17, 17);
  Environment env = make_environment(parse("1 + 0.25*cos(pi*x)*cos(pi*y)", 2), g);
  ScalarField w = solve_logistic_steady(env.field, 0.1);
  CHECK(elliptic_residual(w, env.field, 0.1) <= 1e-8);
  CHECK(std::abs(steady_integral_identity(w, env.field)) <= 1e-8);
  CHECK(sup_norm(w) < env.a_sup);
  CHECK(min_value(w) > 0.0);
}

TEST_CASE("cascade: monotone decrease down to the constant a_min") {
  // The sup distance to the limit decays like 1/k^2 (the effective growth is
  // only clipped on a shrinking layer around the minimum of a), so the 1e-3
  // stop tolerance is first met near stage 156 for this environment.
  auto g = Grid::interval(1.0, 257);
  Environment env = make_environment(parse("1 + 0.5*cos(pi*x)", 1), g);
  UStarCascade casc = cascade(env, 0.1, 200);
  REQUIRE(!casc.iterates.empty());
  CHECK(casc.reached_limit);
  CHECK(casc.iterates.size() <= 160);
  CHECK(casc.growths.size() == casc.iterates.size());
  CHECK(casc.residuals.size() == casc.iterates.size());
  CHECK(sup_diff(casc.growths.front(), env.field) == 0.0);
  for (double r : casc.residuals) CHECK(r <= 1e-8);
  for (std::size_t k = 1; k < casc.iterates.size(); ++k) {
    double worst_increase = 0.0;
    for (std::size_t i = 0; i < env.field.size(); ++i)
      worst_increase =
          std::max(worst_increase, casc.iterates[k][i] - casc.iterates[k - 1][i]);
    CHECK(worst_increase <= 1e-8);
  }
  for (const ScalarField& it : casc.iterates) {
    CHECK(sup_norm(it) <= env.a_sup);
    CHECK(min_value(it) >= env.a_min - 1e-6);
  }
  ScalarField limit(g, env.a_min);
  CHECK(sup_diff(casc.iterates.back(), limit) < 1e-3);
}

TEST_CASE("cascade: sink environments collapse to the zero field") {
  auto g = Grid::interval(1.0, 129);
  Environment env = make_environment(parse("0.5 + cos(2*pi*x)", 1), g);
  UStarCascade casc = cascade(env, 0.1, 50);
  CHECK(casc.reached_limit);
  CHECK(sup_norm(casc.iterates.back()) < 1e-3);
}

TEST_CASE("cascade: a dead first stage violates the assumption") {
  auto g = Grid::interval(1.0, 33);
  Environment env = make_environment(parse("0 - 0.3", 1), g);
  CHECK_THROWS_AS(cascade(env, 0.1, 10), CascadeAssumptionViolated);
  try {
    cascade(env, 0.1, 10);
  } catch (const CascadeAssumptionViolated& e) {
    CHECK(e.k == 0);
  }
}
