#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lvhybrid/grid.hpp"

namespace lvh {

class NotSettled : public std::runtime_error {
 public:
  NotSettled(double t_max, double drift);
  double t_max;
  double drift;
};

class CascadeAssumptionViolated : public std::runtime_error {
 public:
  CascadeAssumptionViolated(int k, std::string reason);
  int k;
  std::string reason;
};

struct SteadySolveConfig {
  double settle_tol = 1e-9;     ///< sup drift per unit time that counts as settled
  double t_max = 1e4;           ///< give up marching past this time
  double extinction_tol = 1e-8; ///< settled states below this sup norm collapse to zero
  double dt = 0.01;             ///< march step
  double cascade_stop_tol = 1e-3;  ///< cascade stops when this close to max(a_min, 0)
};

/// Nonnegative steady state of w_t = d lap(w) + w (growth - w) under no-flux
/// boundaries: time march from strictly positive data (or the warm start)
/// until settled, classify extinction, then polish with Newton so the
/// pointwise elliptic residual reaches solver precision.
ScalarField solve_logistic_steady(const ScalarField& growth, double d,
                                  const SteadySolveConfig& cfg = {},
                                  const ScalarField* warm_start = nullptr);

/// Integral of w (growth - w); vanishes at any steady state.
double steady_integral_identity(const ScalarField& steady, const ScalarField& growth);

/// Sup norm of d lap(w) + w (growth - w).
double elliptic_residual(const ScalarField& steady, const ScalarField& growth, double d);

/// True when growth exceeds the steady state by more than `margin` somewhere.
bool omega_star_nonempty(const ScalarField& steady, const ScalarField& growth,
                         double margin = 0.0);

struct UStarCascade {
  std::vector<ScalarField> iterates;  ///< stage k solves growth a - max(a - iterate[k-1], 0)
  std::vector<ScalarField> growths;   ///< effective growth used at each stage
  std::vector<double> residuals;      ///< elliptic residual of each iterate
  bool reached_limit = false;         ///< last iterate is within stop tol of max(a_min, 0)
};

/// Iterated single-species steady states. Iterates decrease pointwise (up to
/// a small slack); the run stops once an iterate is within cascade_stop_tol
/// of the constant max(a_min, 0) or after k_max stages. The first stage must
/// settle to a positive state; zero iterates later in the cascade are kept
/// and stay zero.
UStarCascade cascade(const Environment& env, double d, int k_max,
                     const SteadySolveConfig& cfg = {});

/// Rows `k,sup_norm,dist_to_limit,residual` preceded by a header.
void write_cascade_csv(const UStarCascade& cascade, const Environment& env,
                       std::ostream& out);

}  // namespace lvh
