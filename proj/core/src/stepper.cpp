#include "lvhybrid/stepper.hpp"

#include <cmath>
#include <utility>

namespace lvh {

namespace {

void clip_negative_roundoff(ScalarField& f) {
  // The factorized solve preserves positivity only up to rounding; the clip
  // keeps the scheme's nonnegativity contract exact.
  for (double& v : f.values())
    if (v < 0.0) v = 0.0;
}

bool all_finite(const ScalarField& f) {
  for (double v : f.values())
    if (!std::isfinite(v)) return false;
  return true;
}

/// Crank-Nicolson over the half step as 2 B - I, with B the backward Euler
/// solve over the quarter step held by `half`. fl(2 b - b) = b, so constant
/// fields pass through bit-exact just like the plain deviation-form solve.
ScalarField crank_nicolson_half(const DiffusionSolver& half, const ScalarField& b) {
  ScalarField x = half.solve(b);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 2.0 * x[i] - b[i];
  return x;
}

/// Quadrature weights (in units of the spacing) for the uniform samples
/// f_0..f_k of an integral over [0, k delta]. Trapezoid ends are replaced by
/// Gregory end corrections once enough points exist, giving O(delta^4).
std::vector<double> gregory_weights(int k) {
  std::vector<double> w(static_cast<std::size_t>(k) + 1, 1.0);
  if (k == 0) { w[0] = 0.0; return w; }
  if (k == 1) { w[0] = w[1] = 0.5; return w; }
  if (k == 2) { w[0] = w[2] = 1.0 / 3.0; w[1] = 4.0 / 3.0; return w; }
  if (k == 3) { w[0] = w[3] = 3.0 / 8.0; w[1] = w[2] = 9.0 / 8.0; return w; }
  if (k == 4) { w[0] = w[4] = 1.0 / 3.0; w[1] = w[3] = 4.0 / 3.0; w[2] = 2.0 / 3.0; return w; }
  w[0] = w[k] = 3.0 / 8.0;
  w[1] = w[k - 1] = 7.0 / 6.0;
  w[2] = w[k - 2] = 23.0 / 24.0;
  return w;
}

}  // namespace

NonFinite::NonFinite(double t_)
    : std::runtime_error("a field value became non-finite at t = " + std::to_string(t_)),
      t(t_) {}

NoConvergence::NoConvergence(const std::string& what) : std::runtime_error(what) {}

void reaction_exact(ScalarField& u, ScalarField& v, const ScalarField& a, double dt) {
  require_same_grid(u, a);
  require_same_grid(v, a);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s0 = u[i] + v[i];
    if (s0 == 0.0) continue;
    const double ai = a[i];
    double m;
    if (ai == 0.0) {
      m = 1.0 / (1.0 + s0 * dt);
    } else if (s0 == ai) {
      m = 1.0;  // the logistic equilibrium is an exact fixed point
    } else {
      // s(dt)/s0 = a / (a + expm1(-a dt) (a - s0)); expm1 avoids the
      // cancellation the raw closed form suffers for small a dt.
      const double em = std::expm1(-ai * dt);
      m = ai / (ai + em * (ai - s0));
    }
    u[i] *= m;
    v[i] *= m;
  }
}

Stepper::Stepper(ScalarField a, SchemeConfig cfg) : a_(std::move(a)), cfg_(cfg) {
  if (!(cfg_.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (cfg_.d < 0.0 || cfg_.epsilon_v < 0.0)
    throw std::invalid_argument("diffusion rates must be >= 0");
  const double cu = cfg_.d * cfg_.dt / 4.0;
  const double cv = cfg_.epsilon_v * cfg_.dt / 4.0;
  if (cu > 0.0) half_u_.emplace(a_.grid_ptr(), cu);
  if (cv > 0.0) half_v_.emplace(a_.grid_ptr(), cv);
}

Stepper::Stepper(const Environment& env, SchemeConfig cfg) : Stepper(env.field, cfg) {}

SimState Stepper::step(SimState state) const {
  require_same_grid(state.u, a_);
  require_same_grid(state.v, a_);
  if (half_u_) {
    state.u = crank_nicolson_half(*half_u_, state.u);
    clip_negative_roundoff(state.u);
  }
  if (half_v_) {
    state.v = crank_nicolson_half(*half_v_, state.v);
    clip_negative_roundoff(state.v);
  }
  reaction_exact(state.u, state.v, a_, cfg_.dt);
  if (half_u_) {
    state.u = crank_nicolson_half(*half_u_, state.u);
    clip_negative_roundoff(state.u);
  }
  if (half_v_) {
    state.v = crank_nicolson_half(*half_v_, state.v);
    clip_negative_roundoff(state.v);
  }
  state.t += cfg_.dt;
  return state;
}

SimState step(const SimState& state, const Environment& env, const SchemeConfig& cfg) {
  return Stepper(env, cfg).step(state);
}

SimState run_until(SimState state, const Environment& env, const SchemeConfig& cfg,
                   const StopCriteria& stop, double cadence,
                   const std::function<void(const SimState&)>& on_snapshot) {
  if (!(cadence > 0.0)) throw std::invalid_argument("snapshot cadence must be positive");
  const Stepper stepper(env, cfg);
  const double half_dt = cfg.dt / 2.0;

  if (!all_finite(state.u) || !all_finite(state.v)) throw NonFinite(state.t);
  if (on_snapshot) on_snapshot(state);
  double last_emitted = state.t;
  double next_snapshot = state.t + cadence;

  ScalarField window_u = state.u;
  ScalarField window_v = state.v;
  double window_start = state.t;
  double next_window = state.t + 1.0;

  while (state.t < stop.t_max - half_dt) {
    state = stepper.step(std::move(state));
    if (state.t >= next_snapshot - half_dt) {
      if (!all_finite(state.u) || !all_finite(state.v)) throw NonFinite(state.t);
      if (on_snapshot) on_snapshot(state);
      last_emitted = state.t;
      next_snapshot += cadence;
    }
    if (state.t >= next_window - half_dt) {
      if (!all_finite(state.u) || !all_finite(state.v)) throw NonFinite(state.t);
      const double width = state.t - window_start;
      const double drift = std::fmax(sup_diff(state.u, window_u), sup_diff(state.v, window_v)) / width;
      if (drift < stop.settle_tol) break;
      window_u = state.u;
      window_v = state.v;
      window_start = state.t;
      next_window += 1.0;
    }
  }

  if (!all_finite(state.u) || !all_finite(state.v)) throw NonFinite(state.t);
  if (on_snapshot && state.t > last_emitted) on_snapshot(state);
  return state;
}

SimState picard_mild_solve(const ScalarField& u0, const ScalarField& v0,
                           const Environment& env, double d, double t_final,
                           int n_iter) {
  require_same_grid(u0, env.field);
  require_same_grid(v0, env.field);
  if (t_final < 0.0) throw std::invalid_argument("t_final must be >= 0");
  if (t_final == 0.0) return SimState{0.0, u0, v0};

  // The v trajectory below is accumulated with trapezoid sums, so the
  // oracle's own error scales with the square of this substep; 2.5e-4 keeps
  // it near 1e-8, well below the stepper gaps it referees.
  const int nt = static_cast<int>(std::ceil(t_final / 2.5e-4));
  const double delta = t_final / nt;
  const double lambda = env.a_sup + sup_norm(u0) + 1.0;
  const std::size_t n = u0.size();
  const ScalarField& a = env.field;

  LaplacianEigenbasis basis(u0.grid_ptr());
  const std::span<const double> lam = basis.eigenvalues();
  const std::vector<double> u0_hat = basis.forward(u0);

  // Per-mode decay factor over one substep: exp(-(lambda - d lam_i) delta).
  std::vector<double> decay(n);
  for (std::size_t i = 0; i < n; ++i) decay[i] = std::exp((d * lam[i] - lambda) * delta);

  std::vector<std::vector<double>> weights(static_cast<std::size_t>(nt) + 1);
  for (int k = 0; k <= nt; ++k) weights[static_cast<std::size_t>(k)] = gregory_weights(k);

  std::vector<ScalarField> u_traj(static_cast<std::size_t>(nt) + 1, u0);
  std::vector<ScalarField> v_traj(static_cast<std::size_t>(nt) + 1, v0);

  auto fill_v_closed_form = [&]() {
    // v(t) = v0 e^{A(t)} / (1 + v0 int_0^t e^{A(s)} ds), A = int_0^t (a - u),
    // with both time integrals accumulated by the trapezoid rule.
    std::vector<double> acc_a(n, 0.0);
    std::vector<double> acc_i(n, 0.0);
    std::vector<double> e_prev(n, 1.0);
    for (int k = 1; k <= nt; ++k) {
      const ScalarField& up = u_traj[static_cast<std::size_t>(k) - 1];
      const ScalarField& uk = u_traj[static_cast<std::size_t>(k)];
      ScalarField& vk = v_traj[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < n; ++i) {
        acc_a[i] += 0.5 * delta * ((a[i] - up[i]) + (a[i] - uk[i]));
        const double e = std::exp(acc_a[i]);
        acc_i[i] += 0.5 * delta * (e_prev[i] + e);
        e_prev[i] = e;
        vk[i] = v0[i] * e / (1.0 + v0[i] * acc_i[i]);
      }
    }
  };

  std::vector<std::vector<double>> f_hat(static_cast<std::size_t>(nt) + 1);
  double prev_diff = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < n_iter; ++iter) {
    fill_v_closed_form();

    ScalarField f(u0.grid_ptr());
    for (int k = 0; k <= nt; ++k) {
      const ScalarField& uk = u_traj[static_cast<std::size_t>(k)];
      const ScalarField& vk = v_traj[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < n; ++i)
        f[i] = (lambda + a[i] - uk[i] - vk[i]) * uk[i];
      f_hat[static_cast<std::size_t>(k)] = basis.forward(f);
    }

    double diff = 0.0;
    std::vector<double> acc(n);
    for (int k = 1; k <= nt; ++k) {
      const std::vector<double>& w = weights[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < n; ++i) {
        // Homogeneous part plus the Duhamel sum, all in eigenspace:
        // u_hat_k = e^{-(lambda - d lam) t_k} u0_hat
        //         + delta sum_j w_j e^{-(lambda - d lam)(t_k - t_j)} f_hat_j.
        double sum = u0_hat[i];
        for (int j = 0; j < k; ++j)
          sum = (sum + w[static_cast<std::size_t>(j)] * delta * f_hat[static_cast<std::size_t>(j)][i]) * decay[i];
        sum += w[static_cast<std::size_t>(k)] * delta * f_hat[static_cast<std::size_t>(k)][i];
        acc[i] = sum;
      }
      ScalarField u_new = basis.inverse(acc);
      diff = std::fmax(diff, sup_diff(u_new, u_traj[static_cast<std::size_t>(k)]));
      u_traj[static_cast<std::size_t>(k)] = std::move(u_new);
    }

    if (diff < 1e-8) {
      fill_v_closed_form();
      return SimState{t_final, u_traj[static_cast<std::size_t>(nt)],
                      v_traj[static_cast<std::size_t>(nt)]};
    }
    if (diff >= prev_diff)
      throw NoConvergence("mild-solution iteration stopped contracting (t_final too large)");
    prev_diff = diff;
  }
  throw NoConvergence("mild-solution iteration did not converge within n_iter sweeps");
}

}  // namespace lvh
