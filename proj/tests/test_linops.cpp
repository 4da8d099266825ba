#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lvhybrid/linops.hpp"

using namespace lvh;

namespace {

ScalarField random_field(const GridPtr& g, unsigned seed, double lo = 0.5,
                         double hi = 1.5) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
  return f;
}

double weighted_dot(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.grid().weight(i) * a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("laplacian: exact stencil on a coarse parabola") {
  auto g = Grid::interval(1.0, 5);
  ScalarField f = sample(parse("x^2", 1), g);
  ScalarField lf = apply_laplacian(f);
  CHECK(lf[0] == 2.0);
  CHECK(lf[1] == 2.0);
  CHECK(lf[2] == 2.0);
  CHECK(lf[3] == 2.0);
  CHECK(lf[4] == -14.0);
}

TEST_CASE("laplacian: approximates the continuum on Neumann-compatible data") {
  auto g = Grid::interval(1.0, 257);
  ScalarField f = sample(parse("cos(pi*x)", 1), g);
  ScalarField lf = apply_laplacian(f);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    worst = std::max(worst, std::abs(lf[i] + pi2 * f[i]));
  CHECK(worst <= 1e-3);
}

TEST_CASE("laplacian: quadrature sum vanishes and the operator is symmetric") {
  auto g = Grid::interval(1.0, 33);
  ScalarField f = random_field(g, 7);
  ScalarField h = random_field(g, 8);
  CHECK(std::abs(integrate(apply_laplacian(f))) <= 1e-12);
  CHECK(std::abs(weighted_dot(apply_laplacian(f), h) -
                 weighted_dot(f, apply_laplacian(h))) <= 1e-10);

  auto g2 = Grid::rectangle(1.0, 1.5, 9, 7);
  ScalarField f2 = random_field(g2, 9);
  ScalarField h2 = random_field(g2, 10);
  CHECK(std::abs(integrate(apply_laplacian(f2))) <= 1e-12);
  CHECK(std::abs(weighted_dot(apply_laplacian(f2), h2) -
                 weighted_dot(f2, apply_laplacian(h2))) <= 1e-10);
}

TEST_CASE("laplacian: separable 2-d data") {
  auto g = Grid::rectangle(1.0, 1.0, 33, 33);
  ScalarField f = sample(parse("cos(pi*x) * cos(pi*y)", 2), g);
  ScalarField lf = apply_laplacian(f);
  const double factor = 2.0 * std::numbers::pi * std::numbers::pi;
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    worst = std::max(worst, std::abs(lf[i] + factor * f[i]));
  CHECK(worst <= 5e-2);
}

TEST_CASE("eigenbasis: nonpositive spectrum and lossless round trip") {
  auto g = Grid::interval(1.0, 17);
  LaplacianEigenbasis basis(g);
  for (double lambda : basis.eigenvalues()) CHECK(lambda <= 1e-10);
  ScalarField f = random_field(g, 11);
  ScalarField back = basis.inverse(basis.forward(f));
  CHECK(sup_diff(f, back) <= 1e-12);

  auto g2 = Grid::rectangle(1.0, 1.0, 9, 5);
  LaplacianEigenbasis basis2(g2);
  ScalarField f2 = random_field(g2, 12);
  CHECK(sup_diff(f2, basis2.inverse(basis2.forward(f2))) <= 1e-12);
}

TEST_CASE("diffusion solve: small residual, exact constants, maximum principle") {
  auto g = Grid::interval(1.0, 129);
  const double c = 0.05;
  DiffusionSolver solver(g, c);
  ScalarField b = sample(parse("exp(x) + 0.2*cos(2*pi*x)", 1), g);
  ScalarField x = solver.solve(b);
  ScalarField lx = apply_laplacian(x);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max(worst, std::abs(x[i] - c * lx[i] - b[i]));
  CHECK(worst <= 1e-10);
  CHECK(min_value(x) >= min_value(b) - 1e-12);
  CHECK(sup_norm(x) <= sup_norm(b) + 1e-12);

  ScalarField k(g, 0.37);
  CHECK(sup_diff(solver.solve(k), k) == 0.0);

  auto g2 = Grid::rectangle(1.0, 1.0, 17, 17);
  DiffusionSolver solver2(g2, c);
  ScalarField k2(g2, 1.25);
  CHECK(sup_diff(solver2.solve(k2), k2) == 0.0);
  ScalarField b2 = random_field(g2, 13);
  ScalarField x2 = solver2.solve(b2);
  ScalarField lx2 = apply_laplacian(x2);
  worst = 0.0;
  for (std::size_t i = 0; i < x2.size(); ++i)
    worst = std::max(worst, std::abs(x2[i] - c * lx2[i] - b2[i]));
  CHECK(worst <= 1e-9);
}

TEST_CASE("propagator: identity at t=0, conservation, semigroup, mean limit") {
  auto g = Grid::interval(1.0, 65);
  DiffusionPropagator prop(g, 0.1);
  ScalarField f = sample(parse("1 + 0.3*cos(pi*x) + 0.1*cos(3*pi*x)", 1), g);
  CHECK(sup_diff(prop.apply(f, 0.0), f) <= 1e-13);
  CHECK(integrate(prop.apply(f, 0.7)) == doctest::Approx(integrate(f)).epsilon(1e-12));
  CHECK(sup_diff(prop.apply(f, 0.3), prop.apply(prop.apply(f, 0.1), 0.2)) <= 1e-11);
  ScalarField flat = prop.apply(f, 1e3);
  const double mean = integrate(f) / g->measure();
  for (std::size_t i = 0; i < flat.size(); ++i)
    CHECK(flat[i] == doctest::Approx(mean).epsilon(1e-8));
}

TEST_CASE("propagator: consistent with the implicit solver at small steps") {
  auto g = Grid::interval(1.0, 65);
  const double d = 0.1, t = 1e-3;
  DiffusionPropagator prop(g, d);
  DiffusionSolver solver(g, d * t);
  ScalarField f = sample(parse("1 + 0.3*cos(pi*x)", 1), g);
  CHECK(sup_diff(prop.apply(f, t), solver.solve(f)) <= 1e-5);
}

TEST_CASE("grad_log_energy: exact on exponentials, frozen on a smooth profile") {
  auto g = Grid::interval(1.0, 65);
  ScalarField u = sample(parse("exp(x)", 1), g);
  CHECK(grad_log_energy(u) == doctest::Approx(1.0).epsilon(1e-10));

  auto g2 = Grid::interval(1.0, 257);
  ScalarField w = sample(parse("1 + 0.5*sin(pi*x)", 1), g2);
  CHECK(std::abs(grad_log_energy(w) - 0.86961326285250978) <= 1e-4);

  ScalarField zero(g, 0.0);
  CHECK_THROWS_AS(grad_log_energy(zero), NonPositiveField);
}
