#include "lvhybrid/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <thread>

#include "lvhybrid/diagnostics.hpp"
#include "lvhybrid/steady.hpp"
#include "lvhybrid/stepper.hpp"

namespace lvh {

namespace fs = std::filesystem;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
  }
  return "unknown";
}

bool RunReport::all_passed() const {
  for (const auto& c : checks)
    if (c.verdict == Verdict::fail) return false;
  return true;
}

namespace {

double default_tolerance(const std::string& name) {
  static const std::map<std::string, double> tols = {
      {"global-bound", 1e-6},        {"sink-extinction", 1e-2},
      {"floor-ustar", 5e-2},         {"floor-amin", 5e-2},
      {"lyapunov-identity", 1e-2},   {"lyapunov-threshold", 1e-2},
      {"continuum-steady", 1e-12},   {"ordered-coexistence", 1e-2},
      {"cascade-limit", 1e-3},       {"oracle-agreement", 1e-3},
      {"steady-identity", 1e-6},
  };
  return tols.at(name);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::ofstream open_output(RunReport& report, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  report.outputs.push_back(path.string());
  return out;
}

}  // namespace

RunReport run_scenario(const Scenario& sc) {
  const auto wall_start = std::chrono::steady_clock::now();
  RunReport report;
  report.scenario = sc.name;

  const GridPtr grid = sc.make_grid();
  const Environment env = make_environment(parse(sc.a_source, sc.dimension), grid);
  const ScalarField u0 = sample(parse(sc.u0_source, sc.dimension), grid);
  const ScalarField v0 = sample(parse(sc.v0_source, sc.dimension), grid);
  if (min_value(u0) < 0.0 || min_value(v0) < 0.0)
    throw std::invalid_argument(sc.name + ": initial data must be nonnegative");

  const fs::path out_dir(sc.output_dir);
  fs::create_directories(out_dir);

  auto has = [&](const char* name) {
    for (const auto& c : sc.checks)
      if (c.name == name) return true;
    return false;
  };

  const bool need_ustar = has("floor-ustar") || has("steady-identity");
  const bool need_lyapunov = has("lyapunov-identity") || has("lyapunov-threshold");

  std::optional<ScalarField> u_star;
  if (need_ustar) u_star = solve_logistic_steady(env.field, sc.d);

  std::optional<UStarCascade> casc;
  std::string cascade_error;
  if (has("cascade-limit")) {
    try {
      casc = cascade(env, sc.d, sc.cascade_k_max);
      auto out = open_output(report, out_dir / "cascade.csv");
      write_cascade_csv(*casc, env, out);
    } catch (const CascadeAssumptionViolated& e) {
      cascade_error = e.what();
    }
  }

  std::optional<double> oracle_gap;
  std::string oracle_error;
  if (has("oracle-agreement") && sc.epsilon_v == 0.0) {
    try {
      const double oracle_dt = 1e-3;
      Stepper stepper(env, SchemeConfig{sc.d, 0.0, oracle_dt});
      SimState s{0.0, u0, v0};
      for (int i = 0; i < 100; ++i) s = stepper.step(std::move(s));
      const SimState mild = picard_mild_solve(u0, v0, env, sc.d, 0.1);
      oracle_gap = std::max(sup_diff(s.u, mild.u), sup_diff(s.v, mild.v));
    } catch (const NoConvergence& e) {
      oracle_error = e.what();
    }
  }

  std::map<std::string, ICReport> ic;
  if (has("sink-extinction"))
    ic["sink-extinction"] = check_initial_conditions(ICMode::sink_extinction, u0, v0, env);
  if (has("floor-amin"))
    ic["floor-amin"] = check_initial_conditions(ICMode::no_sink_floor, u0, v0, env);
  if (has("ordered-coexistence"))
    ic["ordered-coexistence"] = check_initial_conditions(ICMode::ordered, u0, v0, env);
  if (has("lyapunov-threshold"))
    ic["lyapunov-threshold"] =
        check_initial_conditions(ICMode::lyapunov_threshold, u0, v0, env);

  const bool strictly_positive_start = min_value(u0) > 0.0 && min_value(v0) > 0.0;

  const ScalarField zero_field(grid, 0.0);
  const ScalarField amin_field(grid, env.a_min);
  const ScalarField* floor_ref = nullptr;
  if (u_star && has("floor-ustar")) floor_ref = &*u_star;
  else if (has("floor-amin")) floor_ref = &amin_field;
  else if (has("sink-extinction")) floor_ref = &zero_field;

  std::vector<DiagnosticsRecord> records;
  double drift_max = 0.0;
  std::optional<SimState> prev_snap;
  int snapshot_index = 0;
  auto on_snapshot = [&](const SimState& s) {
    records.push_back(make_record(s, env, need_lyapunov, floor_ref));
    if (prev_snap && s.t > prev_snap->t) {
      const double gap = s.t - prev_snap->t;
      drift_max = std::max(
          drift_max, std::max(sup_diff(s.u, prev_snap->u), sup_diff(s.v, prev_snap->v)) / gap);
    }
    if (snapshot_index % sc.field_stride == 0) {
      char name_u[48], name_v[48];
      std::snprintf(name_u, sizeof(name_u), "field_u_t%.3f.csv", s.t);
      std::snprintf(name_v, sizeof(name_v), "field_v_t%.3f.csv", s.t);
      auto fu = open_output(report, out_dir / name_u);
      write_field_csv(s.u, fu);
      auto fv = open_output(report, out_dir / name_v);
      write_field_csv(s.v, fv);
    }
    prev_snap = s;
    ++snapshot_index;
  };

  const SimState final_state =
      run_until(SimState{0.0, u0, v0}, env, SchemeConfig{sc.d, sc.epsilon_v, sc.dt},
                StopCriteria{sc.t_max, sc.settle_tol}, sc.cadence, on_snapshot);

  report.final_t = final_state.t;
  report.final_sup_u = sup_norm(final_state.u);
  report.final_sup_v = sup_norm(final_state.v);
  report.final_min_u = min_value(final_state.u);
  report.final_min_v = min_value(final_state.v);

  // The final snapshot may fall off the cadence; the Lyapunov identity wants
  // uniform spacing, so drop a trailing irregular record for that check.
  std::span<const DiagnosticsRecord> uniform{records};
  if (uniform.size() >= 3) {
    const double delta = uniform[1].t - uniform[0].t;
    const double last = uniform[uniform.size() - 1].t - uniform[uniform.size() - 2].t;
    if (std::abs(last - delta) > 1e-9 * std::max(1.0, delta))
      uniform = uniform.subspan(0, uniform.size() - 1);
  }

  for (const CheckRequest& req : sc.checks) {
    CheckResult r;
    r.name = req.name;
    r.tolerance = req.tolerance.value_or(default_tolerance(req.name));
    auto gated = [&]() -> bool {
      auto it = ic.find(req.name);
      if (it != ic.end() && !it->second.ok) {
        r.verdict = Verdict::skipped;
        r.reason = "hypothesis not satisfied: " + it->second.detail;
        return true;
      }
      return false;
    };

    if (req.name == "global-bound") {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& rec : records)
        if (rec.t >= 50.0) worst = std::max(worst, rec.bound_excess);
      if (!std::isfinite(worst)) {
        r.verdict = Verdict::skipped;
        r.reason = "no snapshots at or beyond t = 50";
      } else {
        r.measured = worst;
        r.verdict = worst <= r.tolerance ? Verdict::pass : Verdict::fail;
        if (r.verdict == Verdict::fail)
          r.reason = "a field exceeded sup a by " + fmt(worst) + " after the transient";
      }
    } else if (req.name == "sink-extinction") {
      if (!gated()) {
        double over = 0.0, under = 0.0;
        for (std::size_t i = 0; i < final_state.v.size(); ++i) {
          const double a_plus = std::max(env.field[i], 0.0);
          over = std::max(over, a_plus - final_state.v[i]);
          under = std::max(under, final_state.v[i] - a_plus);
        }
        r.measured = std::max({report.final_sup_u, over / 5.0, under / 5.0});
        r.verdict = r.measured < r.tolerance ? Verdict::pass : Verdict::fail;
        if (r.verdict == Verdict::fail)
          r.reason = "final sup u = " + fmt(report.final_sup_u) + ", v gap to [a]_+ = (" +
                     fmt(over) + ", " + fmt(under) + ") against 5x tolerance";
      }
    } else if (req.name == "floor-ustar") {
      std::optional<std::size_t> bad;
      for (std::size_t i = 0; i < v0.size() && !bad; ++i)
        if (v0[i] == 0.0 && env.field[i] - (*u_star)[i] > 1e-12) bad = i;
      if (bad) {
        r.verdict = Verdict::skipped;
        r.reason = "hypothesis not satisfied: initial v vanishes at node " +
                   std::to_string(*bad) + " where a exceeds the steady state";
      } else {
        r.measured = std::max(0.0, floor_check(final_state, env, *u_star));
        r.verdict = r.measured <= r.tolerance ? Verdict::pass : Verdict::fail;
        if (r.verdict == Verdict::fail)
          r.reason = "v ends below the steady-state floor by " + fmt(r.measured);
      }
    } else if (req.name == "floor-amin") {
      if (!gated()) {
        r.measured = std::max(0.0, floor_check(final_state, env, amin_field));
        r.verdict = r.measured <= r.tolerance ? Verdict::pass : Verdict::fail;
        if (r.verdict == Verdict::fail)
          r.reason = "v ends below the a - a_min floor by " + fmt(r.measured);
      }
    } else if (req.name == "lyapunov-identity") {
      if (!strictly_positive_start) {
        r.verdict = Verdict::skipped;
        r.reason = "hypothesis not satisfied: initial data not strictly positive";
      } else {
        try {
          const std::vector<double> residuals = lyapunov_residual(uniform, sc.d);
          const double delta = uniform[1].t - uniform[0].t;
          double worst_norm = 0.0;
          for (std::size_t j = 0; j < residuals.size(); ++j) {
            const double scale = 1.0 + sc.d * *uniform[j + 1].grad_log_energy_u;
            worst_norm = std::max(worst_norm, residuals[j] / scale);
          }
          double worst_increase = 0.0;
          for (std::size_t j = 0; j + 1 < uniform.size(); ++j) {
            const double slack =
                delta * r.tolerance * (1.0 + sc.d * *uniform[j].grad_log_energy_u);
            worst_increase = std::max(
                worst_increase, *uniform[j + 1].lyapunov_m - *uniform[j].lyapunov_m - slack);
          }
          r.measured = worst_norm;
          if (worst_norm > r.tolerance) {
            r.verdict = Verdict::fail;
            r.reason = "dissipation identity residual " + fmt(worst_norm);
          } else if (worst_increase > 0.0) {
            r.verdict = Verdict::fail;
            r.reason = "mass increased beyond the residual slack by " + fmt(worst_increase);
          } else {
            r.verdict = Verdict::pass;
          }
        } catch (const UndefinedM& e) {
          r.verdict = Verdict::skipped;
          r.reason = e.what();
        }
      }
    } else if (req.name == "lyapunov-threshold") {
      if (!gated()) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& rec : records)
          if (rec.t > 100.0) best = std::max(best, rec.sup_u);
        if (!std::isfinite(best)) {
          r.verdict = Verdict::skipped;
          r.reason = "no snapshots beyond t = 100";
        } else {
          r.measured = best;
          r.verdict = best >= env.a_min - r.tolerance ? Verdict::pass : Verdict::fail;
          if (r.verdict == Verdict::fail)
            r.reason = "sup u stayed at " + fmt(best) + ", short of a_min = " + fmt(env.a_min);
        }
      }
    } else if (req.name == "continuum-steady") {
      if (records.size() < 2) {
        r.verdict = Verdict::skipped;
        r.reason = "need at least two snapshots to measure drift";
      } else {
        r.measured = drift_max;
        r.verdict = drift_max <= r.tolerance ? Verdict::pass : Verdict::fail;
        if (r.verdict == Verdict::fail)
          r.reason = "state drifted " + fmt(drift_max) + " per unit time";
      }
    } else if (req.name == "ordered-coexistence") {
      if (!gated()) {
        double du = 0.0, dv = 0.0;
        for (std::size_t i = 0; i < final_state.u.size(); ++i) {
          du = std::max(du, std::abs(final_state.u[i] - env.a_min));
          dv = std::max(dv, std::abs(final_state.v[i] - (env.field[i] - env.a_min)));
        }
        r.measured = std::max(du, dv);
        r.verdict = r.measured < r.tolerance ? Verdict::pass : Verdict::fail;
        if (r.verdict == Verdict::fail)
          r.reason = "final distance to (a_min, a - a_min): u " + fmt(du) + ", v " + fmt(dv);
      }
    } else if (req.name == "cascade-limit") {
      if (!cascade_error.empty()) {
        r.verdict = Verdict::fail;
        r.reason = cascade_error;
      } else {
        const ScalarField limit(grid, std::max(env.a_min, 0.0));
        r.measured = sup_diff(casc->iterates.back(), limit);
        r.verdict = r.measured < r.tolerance ? Verdict::pass : Verdict::fail;
        if (r.verdict == Verdict::fail)
          r.reason = "after " + std::to_string(casc->iterates.size()) +
                     " stages the iterate is " + fmt(r.measured) + " from the limit";
      }
    } else if (req.name == "oracle-agreement") {
      if (sc.epsilon_v != 0.0) {
        r.verdict = Verdict::skipped;
        r.reason = "mild-solution oracle requires epsilon_v = 0";
      } else if (!oracle_error.empty()) {
        r.verdict = Verdict::fail;
        r.reason = oracle_error;
      } else {
        r.measured = *oracle_gap;
        r.verdict = r.measured <= r.tolerance ? Verdict::pass : Verdict::fail;
        if (r.verdict == Verdict::fail)
          r.reason = "stepper and mild solution differ by " + fmt(r.measured) + " at t = 0.1";
      }
    } else if (req.name == "steady-identity") {
      r.tolerance = req.tolerance.value_or(default_tolerance(req.name)) * grid->measure() *
                    env.a_sup * env.a_sup;
      r.measured = std::abs(steady_integral_identity(*u_star, env.field));
      r.verdict = r.measured <= r.tolerance ? Verdict::pass : Verdict::fail;
      if (r.verdict == Verdict::fail) r.reason = "steady integral " + fmt(r.measured);
      if (r.verdict == Verdict::pass && sup_norm(*u_star) > 0.0) {
        if (sup_norm(*u_star) > env.a_sup - 1e-3) {
          r.verdict = Verdict::fail;
          r.reason = "steady state does not stay strictly below sup a";
        } else if (!omega_star_nonempty(*u_star, env.field)) {
          r.verdict = Verdict::fail;
          r.reason = "growth never exceeds the steady state";
        }
      }
    } else {
      r.verdict = Verdict::skipped;
      r.reason = "unknown check";
    }
    report.checks.push_back(std::move(r));
  }

  {
    auto out = open_output(report, out_dir / "diagnostics.csv");
    write_records_csv(records, out);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  {
    auto out = open_output(report, out_dir / "report.json");
    write_report_json(report, out);
  }
  return report;
}

void write_report_json(const RunReport& report, std::ostream& out) {
  nlohmann::json j;
  j["scenario"] = report.scenario;
  j["wall_seconds"] = report.wall_seconds;
  j["final"] = {{"t", report.final_t},
                {"sup_u", report.final_sup_u},
                {"sup_v", report.final_sup_v},
                {"min_u", report.final_min_u},
                {"min_v", report.final_min_v}};
  j["all_passed"] = report.all_passed();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks)
    j["checks"].push_back({{"name", c.name},
                           {"verdict", to_string(c.verdict)},
                           {"measured", c.measured},
                           {"tolerance", c.tolerance},
                           {"reason", c.reason}});
  j["outputs"] = report.outputs;
  out << j.dump(2) << '\n';
}

SweepResult run_sweep(const Scenario& base, const std::string& axis,
                      std::span<const double> values, int workers) {
  if (axis != "d" && axis != "epsilon_v" && axis != "c" && axis != "grid")
    throw std::invalid_argument("unknown sweep axis '" + axis + "'");
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");

  SweepResult result;
  result.axis = axis;
  result.values.assign(values.begin(), values.end());
  result.reports.resize(values.size());

  std::vector<Scenario> points;
  points.reserve(values.size());
  for (double v : values) {
    Scenario sc = base;
    char label[40];
    std::snprintf(label, sizeof(label), "%g", v);
    sc.name = base.name + "-" + axis + "-" + label;
    sc.output_dir = base.output_dir + "/" + axis + "-" + label;
    if (axis == "d") {
      if (v < 0.0) throw std::invalid_argument("diffusion rate must be nonnegative");
      sc.d = v;
    } else if (axis == "epsilon_v") {
      if (v < 0.0) throw std::invalid_argument("epsilon_v must be nonnegative");
      sc.epsilon_v = v;
    } else if (axis == "grid") {
      const long n = std::lround(v);
      if (n < 3 || std::abs(v - static_cast<double>(n)) > 0.0)
        throw std::invalid_argument("grid axis values must be integers >= 3");
      sc.nodes_x = static_cast<int>(n);
      sc.nodes_y = static_cast<int>(n);
    } else {  // continuum member (c, a - c)
      if (!(v > 0.0)) throw std::invalid_argument("continuum values must be positive");
      char cbuf[40];
      std::snprintf(cbuf, sizeof(cbuf), "%.17g", v);
      sc.u0_source = cbuf;
      sc.v0_source = "(" + base.a_source + ") - " + cbuf;
    }
    points.push_back(std::move(sc));
  }

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) break;
      try {
        result.reports[i] = run_scenario(points[i]);
      } catch (const std::exception& e) {
        RunReport r;
        r.scenario = points[i].name;
        r.checks.push_back({"run-error", Verdict::fail, 0.0, 0.0, e.what()});
        result.reports[i] = std::move(r);
      }
    }
  };
  const int n_workers =
      std::max(1, std::min<int>(workers, static_cast<int>(points.size())));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  fs::create_directories(base.output_dir);
  const fs::path summary = fs::path(base.output_dir) / "sweep.csv";
  std::ofstream out(summary);
  if (!out) throw std::runtime_error("cannot write " + summary.string());
  out << "value,scenario,final_t,final_sup_u,final_sup_v,all_passed,verdicts\n";
  char buf[160];
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    const RunReport& r = result.reports[i];
    std::string verdicts;
    for (const auto& c : r.checks) {
      if (!verdicts.empty()) verdicts += ';';
      verdicts += c.name + "=" + to_string(c.verdict);
    }
    std::snprintf(buf, sizeof(buf), "%.17g,%s,%.17g,%.17g,%.17g,%d,", result.values[i],
                  r.scenario.c_str(), r.final_t, r.final_sup_u, r.final_sup_v,
                  r.all_passed() ? 1 : 0);
    out << buf << verdicts << '\n';
  }
  result.summary_path = summary.string();
  return result;
}

}  // namespace lvh
