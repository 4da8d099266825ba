#include "lvhybrid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "lvhybrid/linops.hpp"

namespace lvh {

UndefinedM::UndefinedM(const std::string& why)
    : std::runtime_error("Lyapunov mass is undefined: " + why) {}

PreconditionSinkPresent::PreconditionSinkPresent()
    : std::runtime_error(
          "threshold mass requires a strictly positive growth profile") {}

double lyapunov_m(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u, v);
  const Grid& g = u.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) throw NonPositiveField("u", i, u[i]);
    if (!(v[i] > 0.0)) throw NonPositiveField("v", i, v[i]);
    sum += g.weight(i) * (std::log(v[i]) - std::log(u[i]));
  }
  return sum;
}

std::vector<double> lyapunov_residual(std::span<const DiagnosticsRecord> records, double d) {
  if (records.size() < 3)
    throw UndefinedM("need at least three records for a centered difference");
  const double delta = records[1].t - records[0].t;
  if (!(delta > 0.0)) throw UndefinedM("records are not increasing in time");
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    if (std::abs(records[i + 1].t - records[i].t - delta) > 1e-9 * std::max(1.0, delta))
      throw UndefinedM("records are not uniformly spaced");
  }
  for (const auto& r : records)
    if (!r.lyapunov_m || !r.grad_log_energy_u)
      throw UndefinedM("a record is missing the mass or the grad-log energy");

  std::vector<double> out;
  out.reserve(records.size() - 2);
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const double rate = (*records[i + 1].lyapunov_m - *records[i - 1].lyapunov_m) / (2.0 * delta);
    out.push_back(std::abs(rate + d * *records[i].grad_log_energy_u));
  }
  return out;
}

namespace {

bool has_min_plateau(const Environment& env) {
  const Grid& g = env.field.grid();
  auto at_min = [&](std::size_t i) { return env.field[i] - env.a_min <= 1e-12; };
  const int nx = g.nodes_x();
  const int ny = g.dimension() == 2 ? g.nodes_y() : 1;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      std::size_t i = static_cast<std::size_t>(iy) * nx + ix;
      if (at_min(i) && at_min(i + 1)) return true;
    }
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      std::size_t i = static_cast<std::size_t>(iy) * nx + ix;
      if (at_min(i) && at_min(i + static_cast<std::size_t>(nx))) return true;
    }
  return false;
}

/// Midpoint quadrature of ln((a - a_min)/a_min) on a mesh refined by `factor`
/// relative to the grid. Returns -inf when a sample touches or crosses the
/// minimum.
double m_sharp_level(const Environment& env, int factor) {
  const Grid& g = env.field.grid();
  const double log_floor = std::log(env.a_min);
  const int rx = (g.nodes_x() - 1) * factor;
  if (g.dimension() == 1) {
    const double h = g.extent_x() / rx;
    double sum = 0.0;
    for (int i = 0; i < rx; ++i) {
      const double gap = eval(env.a, {(i + 0.5) * h, 0.0}) - env.a_min;
      if (!(gap > 0.0)) return -std::numeric_limits<double>::infinity();
      sum += (std::log(gap) - log_floor) * h;
    }
    return sum;
  }
  const int ry = (g.nodes_y() - 1) * factor;
  const double hx = g.extent_x() / rx;
  const double hy = g.extent_y() / ry;
  double sum = 0.0;
  for (int iy = 0; iy < ry; ++iy)
    for (int ix = 0; ix < rx; ++ix) {
      const double gap = eval(env.a, {(ix + 0.5) * hx, (iy + 0.5) * hy}) - env.a_min;
      if (!(gap > 0.0)) return -std::numeric_limits<double>::infinity();
      sum += (std::log(gap) - log_floor) * hx * hy;
    }
  return sum;
}

}  // namespace

MSharp m_sharp(const Environment& env, int refine) {
  if (refine < 1) throw std::invalid_argument("m_sharp needs a positive refinement factor");
  if (!(env.a_min > 0.0)) throw PreconditionSinkPresent();
  if (has_min_plateau(env))
    return {-std::numeric_limits<double>::infinity(), false};

  // Midpoints of a mesh commensurate with the grid never land on grid nodes,
  // so isolated singular nodes are never sampled.
  int factor = refine;
  bool stable = true;
  double value = m_sharp_level(env, factor);
  if (!std::isfinite(value)) return {-std::numeric_limits<double>::infinity(), false};
  for (int level = 0; level < 2; ++level) {
    factor *= 2;
    const double next = m_sharp_level(env, factor);
    if (!std::isfinite(next)) return {-std::numeric_limits<double>::infinity(), false};
    stable = stable && std::abs(next - value) <= 1e-3;
    value = next;
  }
  return {value, stable};
}

double floor_check(const SimState& state, const Environment& env,
                   const ScalarField& reference) {
  require_same_grid(state.v, env.field);
  require_same_grid(reference, env.field);
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.v.size(); ++i) {
    const double floor = std::max(env.field[i] - reference[i], 0.0);
    worst = std::max(worst, floor - state.v[i]);
  }
  return worst;
}

namespace {

std::string node_detail(const char* what, std::size_t i, double value) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s at node %zu (value %.6g)", what, i, value);
  return buf;
}

ICReport verdict(bool ok, std::string detail) {
  ICReport report;
  report.ok = ok;
  report.detail = std::move(detail);
  return report;
}

}  // namespace

ICReport check_initial_conditions(ICMode mode, const ScalarField& u0,
                                  const ScalarField& v0, const Environment& env) {
  require_same_grid(u0, env.field);
  require_same_grid(v0, env.field);
  if (min_value(u0) < 0.0) return verdict(false, "initial u is negative somewhere");
  if (min_value(v0) < 0.0) return verdict(false, "initial v is negative somewhere");
  const double slack = 1e-12 * std::max(1.0, env.a_sup);
  // Where v starts at zero, it stays there; the zero set must lie inside the
  // region the limit profile vanishes on anyway.
  auto v_zero_set_inside = [&](double ceiling) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < v0.size(); ++i)
      if (v0[i] == 0.0 && env.field[i] > ceiling + slack) return i;
    return std::nullopt;
  };

  switch (mode) {
    case ICMode::sink_extinction:
      if (!env.sink_set_nonempty) return verdict(false, "growth profile has no sink");
      if (auto i = v_zero_set_inside(0.0))
        return verdict(false, node_detail("initial v vanishes where a is positive", *i,
                                         env.field[*i]));
      return verdict(true, "");

    case ICMode::no_sink_floor:
      if (env.sink_set_nonempty) return verdict(false, "growth profile has a sink");
      if (sup_norm(u0) == 0.0 || sup_norm(v0) == 0.0)
        return verdict(false, "initial data must not be identically zero");
      if (auto i = v_zero_set_inside(env.a_min))
        return verdict(false, node_detail("initial v vanishes where a exceeds its minimum",
                                         *i, env.field[*i]));
      return verdict(true, "");

    case ICMode::ordered: {
      if (env.sink_set_nonempty) return verdict(false, "growth profile has a sink");
      for (std::size_t i = 0; i < u0.size(); ++i) {
        if (u0[i] < env.a_min - slack)
          return verdict(false, node_detail("initial u below the profile minimum", i, u0[i]));
        if (v0[i] > env.field[i] - env.a_min + slack)
          return verdict(false, node_detail("initial v above a - a_min", i, v0[i]));
      }
      if (auto i = v_zero_set_inside(env.a_min))
        return verdict(false, node_detail("initial v vanishes where a exceeds its minimum",
                                         *i, env.field[*i]));
      return verdict(true, "");
    }

    case ICMode::lyapunov_threshold: {
      if (env.sink_set_nonempty) return verdict(false, "growth profile has a sink");
      if (!(min_value(u0) > 0.0) || !(min_value(v0) > 0.0))
        return verdict(false, "both fields must start positive everywhere");
      const MSharp threshold = m_sharp(env);
      const double m0 = lyapunov_m(u0, v0);
      ICReport report;
      report.m0 = m0;
      report.m_sharp_value = threshold.value;
      if (m0 > threshold.value + slack) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "starting mass %.6g above threshold %.6g", m0,
                      threshold.value);
        report.ok = false;
        report.detail = buf;
      } else {
        report.ok = true;
      }
      return report;
    }
  }
  return verdict(false, "unknown mode");
}

DiagnosticsRecord make_record(const SimState& state, const Environment& env,
                              bool with_lyapunov, const ScalarField* floor_reference) {
  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.sup_u = sup_norm(state.u);
  rec.sup_v = sup_norm(state.v);
  rec.min_u = min_value(state.u);
  rec.min_v = min_value(state.v);
  rec.bound_excess = std::max(rec.sup_u, rec.sup_v) - env.a_sup;
  if (with_lyapunov && rec.min_u > 0.0 && rec.min_v > 0.0) {
    rec.lyapunov_m = lyapunov_m(state.u, state.v);
    rec.grad_log_energy_u = grad_log_energy(state.u);
  }
  if (floor_reference != nullptr)
    rec.floor_violation = std::max(0.0, floor_check(state, env, *floor_reference));
  return rec;
}

void write_records_csv(std::span<const DiagnosticsRecord> records, std::ostream& out) {
  out << "t,sup_u,sup_v,min_u,min_v,lyapunov_m,grad_log_energy_u,floor_violation,bound_excess\n";
  char buf[160];
  auto cell = [&](const std::optional<double>& v) -> std::string {
    if (!v) return "";
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
    return buf;
  };
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,", r.t, r.sup_u, r.sup_v,
                  r.min_u, r.min_v);
    out << buf << cell(r.lyapunov_m) << ',' << cell(r.grad_log_energy_u) << ','
        << cell(r.floor_violation) << ',';
    std::snprintf(buf, sizeof(buf), "%.17g\n", r.bound_excess);
    out << buf;
  }
}

}  // namespace lvh
