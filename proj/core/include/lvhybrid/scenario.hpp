#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lvhybrid/grid.hpp"

namespace lvh {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string file, std::string key, std::string reason);
  std::string file;
  std::string key;
  std::string reason;
};

struct CheckRequest {
  std::string name;
  std::optional<double> tolerance;  ///< overrides the check's default when set
};

/// A fully validated run configuration; see the config reference in the
/// README for the file grammar and defaults.
struct Scenario {
  std::string name;
  int dimension = 1;
  double extent_x = 1.0;
  double extent_y = 1.0;
  int nodes_x = 257;
  int nodes_y = 257;
  std::string a_source;
  std::string u0_source;
  std::string v0_source;
  double d = 0.1;
  double epsilon_v = 0.0;
  double dt = 0.01;
  double t_max = 2000.0;
  double settle_tol = 1e-11;
  double cadence = 1.0;
  int field_stride = 10;   ///< full-field snapshot every this many cadences
  int cascade_k_max = 50;
  std::vector<CheckRequest> checks;
  std::string output_dir;  ///< defaults to out/<name>

  GridPtr make_grid() const;
};

/// Names accepted in a `checks` list.
bool is_known_check(const std::string& name);

Scenario parse_scenario(std::string_view text, const std::string& file_label);

/// Read and validate an INI-style scenario file.
Scenario load_config(const std::string& path);

}  // namespace lvh
