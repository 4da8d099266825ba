#include <benchmark/benchmark.h>

#include "lvhybrid/linops.hpp"
#include "lvhybrid/steady.hpp"
#include "lvhybrid/stepper.hpp"

namespace {

using namespace lvh;

void bm_expr_eval(benchmark::State& state) {
  const Profile p = parse("1 + 0.5*cos(pi*x) * tanh(2*x - 1)", 1);
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval(p, {x, 0.0}));
    x += 1e-6;
  }
}
BENCHMARK(bm_expr_eval);

void bm_sample_257(benchmark::State& state) {
  const Profile p = parse("1 + 0.5*cos(pi*x)", 1);
  const GridPtr g = Grid::interval(1.0, 257);
  for (auto _ : state) benchmark::DoNotOptimize(sample(p, g));
}
BENCHMARK(bm_sample_257);

void bm_integrate_257(benchmark::State& state) {
  const GridPtr g = Grid::interval(1.0, 257);
  const ScalarField f = sample(parse("1 + 0.5*cos(pi*x)", 1), g);
  for (auto _ : state) benchmark::DoNotOptimize(integrate(f));
}
BENCHMARK(bm_integrate_257);

void bm_laplacian_257(benchmark::State& state) {
  const GridPtr g = Grid::interval(1.0, 257);
  const NeumannLaplacian lap(g);
  const ScalarField f = sample(parse("1 + 0.5*cos(pi*x)", 1), g);
  for (auto _ : state) benchmark::DoNotOptimize(lap.apply(f));
}
BENCHMARK(bm_laplacian_257);

void bm_diffusion_solve_257(benchmark::State& state) {
  const GridPtr g = Grid::interval(1.0, 257);
  const DiffusionSolver solver(g, 0.0005);
  const ScalarField b = sample(parse("1 + 0.5*cos(pi*x)", 1), g);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(b));
}
BENCHMARK(bm_diffusion_solve_257);

void bm_reaction_257(benchmark::State& state) {
  const GridPtr g = Grid::interval(1.0, 257);
  const ScalarField a = sample(parse("1 + 0.5*cos(pi*x)", 1), g);
  ScalarField u(g, 0.4), v(g, 0.3);
  for (auto _ : state) reaction_exact(u, v, a, 0.01);
}
BENCHMARK(bm_reaction_257);

void bm_step_1d_257(benchmark::State& state) {
  const GridPtr g = Grid::interval(1.0, 257);
  const Environment env = make_environment(parse("1 + 0.5*cos(pi*x)", 1), g);
  const Stepper stepper(env, SchemeConfig{0.1, 0.0, 0.01});
  SimState s{0.0, ScalarField(g, 0.4), ScalarField(g, 0.3)};
  for (auto _ : state) s = stepper.step(std::move(s));
}
BENCHMARK(bm_step_1d_257);

void bm_step_2d_65(benchmark::State& state) {
  const GridPtr g = Grid::rectangle(1.0, 1.0, 65, 65);
  const Environment env =
      make_environment(parse("1 + 0.25*cos(pi*x)*cos(pi*y)", 2), g);
  const Stepper stepper(env, SchemeConfig{0.1, 0.0, 0.01});
  SimState s{0.0, ScalarField(g, 0.4), ScalarField(g, 0.3)};
  for (auto _ : state) s = stepper.step(std::move(s));
}
BENCHMARK(bm_step_2d_65);

void bm_grad_log_energy_257(benchmark::State& state) {
  const GridPtr g = Grid::interval(1.0, 257);
  const ScalarField u = sample(parse("1 + 0.5*sin(pi*x)", 1), g);
  for (auto _ : state) benchmark::DoNotOptimize(grad_log_energy(u));
}
BENCHMARK(bm_grad_log_energy_257);

void bm_steady_solve_65(benchmark::State& state) {
  const GridPtr g = Grid::interval(1.0, 65);
  const Environment env = make_environment(parse("1 + 0.5*cos(pi*x)", 1), g);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_logistic_steady(env.field, 0.1));
}
BENCHMARK(bm_steady_solve_65);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
