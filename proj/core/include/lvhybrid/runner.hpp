#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lvhybrid/scenario.hpp"

namespace lvh {

enum class Verdict { pass, fail, skipped };

std::string to_string(Verdict v);

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::skipped;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string reason;  ///< skip reason or failure detail; empty on a clean pass
};

struct RunReport {
  std::string scenario;
  double wall_seconds = 0.0;
  double final_t = 0.0;
  double final_sup_u = 0.0;
  double final_sup_v = 0.0;
  double final_min_u = 0.0;
  double final_min_v = 0.0;
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;  ///< paths of files written

  /// True when no non-skipped check failed.
  bool all_passed() const;
};

/// Execute a scenario end to end: validate hypotheses for the requested
/// checks, integrate, collect diagnostics at the snapshot cadence, evaluate
/// the checks, and write diagnostics.csv, field snapshots, and report.json
/// under the scenario's output directory.
RunReport run_scenario(const Scenario& sc);

void write_report_json(const RunReport& report, std::ostream& out);

struct SweepResult {
  std::string axis;
  std::vector<double> values;
  std::vector<RunReport> reports;  ///< aligned with values
  std::string summary_path;       ///< combined CSV
};

/// Independent runs of `base` with one knob varied: axis is one of
/// d, epsilon_v, c (continuum member: u0 = c, v0 = a - c), or grid (node
/// count). Failures of individual runs are isolated into their reports.
SweepResult run_sweep(const Scenario& base, const std::string& axis,
                      std::span<const double> values, int workers = 1);

}  // namespace lvh
