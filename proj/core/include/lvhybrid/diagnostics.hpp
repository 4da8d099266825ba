#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "lvhybrid/stepper.hpp"

namespace lvh {

class UndefinedM : public std::runtime_error {
 public:
  explicit UndefinedM(const std::string& why);
};

class PreconditionSinkPresent : public std::runtime_error {
 public:
  PreconditionSinkPresent();
};

/// Per-snapshot scalar diagnostics.
struct DiagnosticsRecord {
  double t = 0.0;
  double sup_u = 0.0;
  double sup_v = 0.0;
  double min_u = 0.0;
  double min_v = 0.0;
  std::optional<double> lyapunov_m;          ///< integral of ln(v/u), strictly positive fields only
  std::optional<double> grad_log_energy_u;   ///< Dirichlet energy of ln u
  std::optional<double> floor_violation;     ///< max of (floor - v) clipped at 0
  double bound_excess = 0.0;                 ///< max of (sup u, sup v) minus sup a, signed
};

/// Integral of ln(v/u); both fields must be strictly positive.
double lyapunov_m(const ScalarField& u, const ScalarField& v);

/// Dissipation-identity residual per interior record: |dM/dt + d E|, with
/// dM/dt the centered difference of lyapunov_m and E the grad-log energy of
/// u at that record. Requires at least three uniformly spaced records, each
/// carrying both lyapunov_m and grad_log_energy_u; entry j belongs to
/// records[j + 1].
std::vector<double> lyapunov_residual(std::span<const DiagnosticsRecord> records,
                                      double d);

struct MSharp {
  double value = 0.0;
  bool integrable = false;
};

/// Threshold mass: integral of ln((a - a_min)/a_min) over the domain.
/// Requires a_min > 0. A plateau of the profile at its minimum (two adjacent
/// grid nodes within 1e-12 of a_min) makes the integral diverge: value -inf,
/// integrable false. Otherwise the integrand is sampled by the midpoint rule
/// on the grid refined by `refine` and by two further doublings; midpoints
/// never coincide with grid nodes, so isolated singular nodes are never
/// sampled. Integrable requires successive estimates to agree within 1e-3.
MSharp m_sharp(const Environment& env, int refine = 4);

/// Signed worst gap between v and the floor max(a - reference, 0):
/// max over nodes of (floor - v). Positive means the floor is violated.
double floor_check(const SimState& state, const Environment& env,
                   const ScalarField& reference);

enum class ICMode {
  sink_extinction,     ///< sink set nonempty, v positive
  no_sink_floor,       ///< a strictly positive, v positive
  ordered,             ///< u0 >= a_min and v0 <= a - a_min pointwise
  lyapunov_threshold,  ///< positive fields with starting mass at most the threshold
};

struct ICReport {
  bool ok = false;
  std::string detail;
  std::optional<double> m0;             ///< starting mass, lyapunov_threshold mode only
  std::optional<double> m_sharp_value;  ///< threshold mass, lyapunov_threshold mode only
};

ICReport check_initial_conditions(ICMode mode, const ScalarField& u0,
                                  const ScalarField& v0, const Environment& env);

/// Snapshot diagnostics. Lyapunov quantities are filled only when requested
/// and both fields are strictly positive; the floor gap only when a
/// reference field is supplied.
DiagnosticsRecord make_record(const SimState& state, const Environment& env,
                              bool with_lyapunov = false,
                              const ScalarField* floor_reference = nullptr);

/// One row per record, full precision, empty cells for absent optionals.
void write_records_csv(std::span<const DiagnosticsRecord> records, std::ostream& out);

}  // namespace lvh
