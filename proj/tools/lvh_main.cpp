#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lvhybrid/expr.hpp"
#include "lvhybrid/grid.hpp"
#include "lvhybrid/runner.hpp"
#include "lvhybrid/scenario.hpp"
#include "lvhybrid/steady.hpp"

namespace {

void apply_overrides(lvh::Scenario& sc, const std::string& out, double dt, int nodes,
                     double tmax) {
  if (!out.empty()) sc.output_dir = out;
  if (dt > 0.0) sc.dt = dt;
  if (nodes > 0) {
    sc.nodes_x = nodes;
    sc.nodes_y = nodes;
  }
  if (tmax > 0.0) sc.t_max = tmax;
}

void print_report(const lvh::RunReport& r) {
  std::printf("scenario %s: t=%.6g sup_u=%.6g sup_v=%.6g (%.2fs)\n", r.scenario.c_str(),
              r.final_t, r.final_sup_u, r.final_sup_v, r.wall_seconds);
  for (const auto& c : r.checks)
    std::printf("  [%-7s] %-20s measured=%-12.6g tol=%-10.6g %s\n",
                lvh::to_string(c.verdict).c_str(), c.name.c_str(), c.measured,
                c.tolerance, c.reason.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid parabolic-ODE competition simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, axis;
  double dt = 0.0, tmax = 0.0;
  int nodes = 0, workers = 1, kmax = 0;
  std::vector<double> values;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "scenario config file")->required();
    cmd->add_option("--out", out_dir, "override output directory");
    cmd->add_option("--dt", dt, "override time step");
    cmd->add_option("--nodes", nodes, "override grid nodes per axis");
    cmd->add_option("--tmax", tmax, "override time horizon");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "run a scenario and evaluate its checks");
  add_common(cmd_run);

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "run a scenario across parameter values");
  add_common(cmd_sweep);
  cmd_sweep->add_option("--axis", axis, "sweep axis: d, epsilon_v, c, or grid")->required();
  cmd_sweep->add_option("--values", values, "comma-separated axis values")
      ->required()
      ->delimiter(',');
  cmd_sweep->add_option("--workers", workers, "parallel workers");

  CLI::App* cmd_cascade = app.add_subcommand("cascade", "iterate the steady-state cascade");
  add_common(cmd_cascade);
  cmd_cascade->add_option("--kmax", kmax, "maximum cascade stages");

  CLI::App* cmd_check = app.add_subcommand("check", "validate a config without running");
  add_common(cmd_check);

  CLI11_PARSE(app, argc, argv);

  try {
    lvh::Scenario sc = lvh::load_config(config_path);
    apply_overrides(sc, out_dir, dt, nodes, tmax);

    if (cmd_run->parsed()) {
      const lvh::RunReport report = lvh::run_scenario(sc);
      print_report(report);
      return report.all_passed() ? 0 : 1;
    }

    if (cmd_sweep->parsed()) {
      const lvh::SweepResult sweep = lvh::run_sweep(sc, axis, values, workers);
      bool ok = true;
      for (const auto& r : sweep.reports) {
        print_report(r);
        ok = ok && r.all_passed();
      }
      std::printf("summary: %s\n", sweep.summary_path.c_str());
      return ok ? 0 : 1;
    }

    if (cmd_cascade->parsed()) {
      if (kmax > 0) sc.cascade_k_max = kmax;
      const lvh::GridPtr grid = sc.make_grid();
      const lvh::Environment env =
          lvh::make_environment(lvh::parse(sc.a_source, sc.dimension), grid);
      const lvh::UStarCascade casc = lvh::cascade(env, sc.d, sc.cascade_k_max);
      std::filesystem::create_directories(sc.output_dir);
      const auto path = std::filesystem::path(sc.output_dir) / "cascade.csv";
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      lvh::write_cascade_csv(casc, env, out);
      std::printf("cascade %s: %zu stages, %s the limit max(a_min, 0) = %.6g\n",
                  sc.name.c_str(), casc.iterates.size(),
                  casc.reached_limit ? "reached" : "did not reach",
                  std::max(env.a_min, 0.0));
      std::printf("wrote %s\n", path.string().c_str());
      return casc.reached_limit ? 0 : 1;
    }

    // check: validate the config and the profiles on the actual grid.
    const lvh::GridPtr grid = sc.make_grid();
    lvh::sample(lvh::parse(sc.a_source, sc.dimension), grid);
    lvh::sample(lvh::parse(sc.u0_source, sc.dimension), grid);
    lvh::sample(lvh::parse(sc.v0_source, sc.dimension), grid);
    std::printf("config ok: %s\n", config_path.c_str());
    std::printf("  name      %s\n", sc.name.c_str());
    if (sc.dimension == 1)
      std::printf("  grid      1D, %d nodes on [0, %g]\n", sc.nodes_x, sc.extent_x);
    else
      std::printf("  grid      2D, %dx%d nodes on [0, %g]x[0, %g]\n", sc.nodes_x,
                  sc.nodes_y, sc.extent_x, sc.extent_y);
    std::printf("  dynamics  d=%g epsilon_v=%g dt=%g t_max=%g cadence=%g\n", sc.d,
                sc.epsilon_v, sc.dt, sc.t_max, sc.cadence);
    std::printf("  output    %s\n", sc.output_dir.c_str());
    std::printf("  checks   ");
    if (sc.checks.empty()) std::printf(" (none)");
    for (const auto& c : sc.checks) {
      if (c.tolerance)
        std::printf(" %s(tol=%g)", c.name.c_str(), *c.tolerance);
      else
        std::printf(" %s", c.name.c_str());
    }
    std::printf("\n");
    return 0;
  } catch (const lvh::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
