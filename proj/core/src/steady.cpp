#include "lvhybrid/steady.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "lvhybrid/linops.hpp"
#include "lvhybrid/stepper.hpp"

namespace lvh {

NotSettled::NotSettled(double t_max, double drift)
    : std::runtime_error("steady solve did not settle by t = " + std::to_string(t_max) +
                         " (drift " + std::to_string(drift) + " per unit time)"),
      t_max(t_max),
      drift(drift) {}

CascadeAssumptionViolated::CascadeAssumptionViolated(int k, std::string reason)
    : std::runtime_error("cascade stage " + std::to_string(k) + ": " + reason),
      k(k),
      reason(std::move(reason)) {}

double steady_integral_identity(const ScalarField& steady, const ScalarField& growth) {
  require_same_grid(steady, growth);
  ScalarField f(steady.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = steady[i] * (growth[i] - steady[i]);
  return integrate(f);
}

double elliptic_residual(const ScalarField& steady, const ScalarField& growth, double d) {
  require_same_grid(steady, growth);
  ScalarField lap = apply_laplacian(steady);
  double sup = 0.0;
  for (std::size_t i = 0; i < steady.size(); ++i) {
    double r = d * lap[i] + steady[i] * (growth[i] - steady[i]);
    sup = std::max(sup, std::abs(r));
  }
  return sup;
}

bool omega_star_nonempty(const ScalarField& steady, const ScalarField& growth,
                         double margin) {
  require_same_grid(steady, growth);
  for (std::size_t i = 0; i < steady.size(); ++i)
    if (growth[i] - steady[i] > margin) return true;
  return false;
}

namespace {

/// One damped Newton pass for F(w) = d lap(w) + w (growth - w) = 0.
/// The Jacobian d L + diag(growth - 2w) is factored directly: Thomas in 1-d,
/// sparse LU in 2-d.
ScalarField newton_polish(ScalarField w, const ScalarField& growth, double d) {
  const Grid& g = w.grid();
  const std::size_t n = w.size();
  double res = elliptic_residual(w, growth, d);
  const double target = 1e-12 * std::max(1.0, sup_norm(growth) * sup_norm(growth));

  for (int iter = 0; iter < 30 && res > target; ++iter) {
    ScalarField lap = apply_laplacian(w);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i)
      rhs[i] = -(d * lap[i] + w[i] * (growth[i] - w[i]));

    std::vector<double> delta(n);
    if (g.dimension() == 1) {
      const double gamma = d / (g.spacing_x() * g.spacing_x());
      std::vector<double> sub(n), diag(n), sup(n);
      for (std::size_t i = 0; i < n; ++i) {
        diag[i] = -2.0 * gamma + growth[i] - 2.0 * w[i];
        sub[i] = gamma;
        sup[i] = gamma;
      }
      sup[0] = 2.0 * gamma;
      sub[n - 1] = 2.0 * gamma;
      for (std::size_t i = 1; i < n; ++i) {
        double m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
      }
      delta[n - 1] = rhs[n - 1] / diag[n - 1];
      for (std::size_t i = n - 1; i-- > 0;)
        delta[i] = (rhs[i] - sup[i] * delta[i + 1]) / diag[i];
    } else {
      const int nx = g.nodes_x();
      const int ny = g.nodes_y();
      const double gx = d / (g.spacing_x() * g.spacing_x());
      const double gy = d / (g.spacing_y() * g.spacing_y());
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(5 * n);
      for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
          const int i = iy * nx + ix;
          trip.emplace_back(i, i,
                            -2.0 * gx - 2.0 * gy + growth[static_cast<std::size_t>(i)] -
                                2.0 * w[static_cast<std::size_t>(i)]);
          trip.emplace_back(i, ix == 0 ? i + 1 : i - 1, ix == 0 || ix == nx - 1 ? 2.0 * gx : gx);
          if (ix != 0 && ix != nx - 1) trip.emplace_back(i, i + 1, gx);
          trip.emplace_back(i, iy == 0 ? i + nx : i - nx, iy == 0 || iy == ny - 1 ? 2.0 * gy : gy);
          if (iy != 0 && iy != ny - 1) trip.emplace_back(i, i + nx, gy);
        }
      }
      Eigen::SparseMatrix<double> jac(static_cast<int>(n), static_cast<int>(n));
      jac.setFromTriplets(trip.begin(), trip.end());
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.compute(jac);
      if (lu.info() != Eigen::Success) break;
      Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(rhs.data(), static_cast<long>(n));
      Eigen::VectorXd x = lu.solve(b);
      for (std::size_t i = 0; i < n; ++i) delta[i] = x[static_cast<long>(i)];
    }

    bool accepted = false;
    double scale = 1.0;
    for (int back = 0; back < 12; ++back, scale *= 0.5) {
      ScalarField trial = w;
      for (std::size_t i = 0; i < n; ++i) trial[i] += scale * delta[i];
      double trial_res = elliptic_residual(trial, growth, d);
      if (trial_res < res) {
        w = trial;
        res = trial_res;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return w;
}

}  // namespace

ScalarField solve_logistic_steady(const ScalarField& growth, double d,
                                  const SteadySolveConfig& cfg,
                                  const ScalarField* warm_start) {
  if (!(d > 0.0)) throw std::invalid_argument("diffusion rate must be positive");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("steady march dt must be positive");
  const GridPtr grid = growth.grid_ptr();

  // With growth <= 0 everywhere, zero is the only nonnegative steady state.
  if (sup_norm(positive_part(growth)) == 0.0) return ScalarField(grid, 0.0);

  ScalarField w(grid);
  if (warm_start != nullptr && sup_norm(*warm_start) > 0.0) {
    require_same_grid(*warm_start, growth);
    w = *warm_start;
  } else {
    const double lift = 0.1 * sup_norm(growth) + 0.1;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::max(growth[i], lift);
  }

  Stepper stepper(growth, SchemeConfig{d, 0.0, cfg.dt});
  SimState state{0.0, w, ScalarField(grid, 0.0)};
  const int steps_per_window = std::max(1, static_cast<int>(std::llround(1.0 / cfg.dt)));
  const double window = steps_per_window * cfg.dt;

  double drift = std::numeric_limits<double>::infinity();
  while (state.t < cfg.t_max) {
    ScalarField before = state.u;
    for (int s = 0; s < steps_per_window; ++s) state = stepper.step(std::move(state));
    drift = sup_diff(before, state.u) / window;
    if (!std::isfinite(drift) || !std::isfinite(sup_norm(state.u))) throw NonFinite(state.t);
    if (drift < cfg.settle_tol) break;
    if (sup_norm(state.u) < cfg.extinction_tol) break;
  }
  if (drift >= cfg.settle_tol && sup_norm(state.u) >= cfg.extinction_tol)
    throw NotSettled(cfg.t_max, drift);

  if (sup_norm(state.u) < cfg.extinction_tol) return ScalarField(grid, 0.0);

  ScalarField polished = newton_polish(std::move(state.u), growth, d);
  if (sup_norm(polished) < cfg.extinction_tol) return ScalarField(grid, 0.0);
  return polished;
}

UStarCascade cascade(const Environment& env, double d, int k_max,
                     const SteadySolveConfig& cfg) {
  if (k_max < 1) throw std::invalid_argument("cascade needs at least one stage");
  UStarCascade out;
  const GridPtr grid = env.field.grid_ptr();
  const double limit = std::max(env.a_min, 0.0);
  const ScalarField limit_field(grid, limit);

  ScalarField growth = env.field;
  for (int k = 0; k < k_max; ++k) {
    const ScalarField* warm = out.iterates.empty() ? nullptr : &out.iterates.back();
    ScalarField u_star = solve_logistic_steady(growth, d, cfg, warm);
    if (out.iterates.empty()) {
      if (sup_norm(u_star) == 0.0)
        throw CascadeAssumptionViolated(0, "the first steady state is the zero field");
    } else {
      double violation = 0.0;
      const ScalarField& prev = out.iterates.back();
      for (std::size_t i = 0; i < u_star.size(); ++i)
        violation = std::max(violation, u_star[i] - prev[i]);
      if (violation > 1e-8)
        throw CascadeAssumptionViolated(
            k, "iterate increased by " + std::to_string(violation));
    }
    out.residuals.push_back(elliptic_residual(u_star, growth, d));
    out.growths.push_back(growth);
    out.iterates.push_back(std::move(u_star));
    if (sup_diff(out.iterates.back(), limit_field) < cfg.cascade_stop_tol) {
      out.reached_limit = true;
      break;
    }
    // Next growth a - max(a - u*, 0) = min(a, u*).
    const ScalarField& prev = out.iterates.back();
    for (std::size_t i = 0; i < growth.size(); ++i)
      growth[i] = std::min(env.field[i], prev[i]);
  }
  return out;
}

void write_cascade_csv(const UStarCascade& cascade, const Environment& env,
                       std::ostream& out) {
  const double limit = std::max(env.a_min, 0.0);
  const ScalarField limit_field(env.field.grid_ptr(), limit);
  out << "k,sup_norm,dist_to_limit,residual\n";
  char buf[128];
  for (std::size_t k = 0; k < cascade.iterates.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", k,
                  sup_norm(cascade.iterates[k]),
                  sup_diff(cascade.iterates[k], limit_field), cascade.residuals[k]);
    out << buf;
  }
}

}  // namespace lvh
