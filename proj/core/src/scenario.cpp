#include "lvhybrid/scenario.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "lvhybrid/expr.hpp"

namespace lvh {

ConfigError::ConfigError(std::string file, std::string key, std::string reason)
    : std::runtime_error(file + ": " + (key.empty() ? reason : key + ": " + reason)),
      file(std::move(file)),
      key(std::move(key)),
      reason(std::move(reason)) {}

GridPtr Scenario::make_grid() const {
  if (dimension == 1) return Grid::interval(extent_x, nodes_x);
  return Grid::rectangle(extent_x, extent_y, nodes_x, nodes_y);
}

namespace {

constexpr std::array known_checks = {
    "global-bound",    "sink-extinction",    "floor-ustar",
    "floor-amin",      "lyapunov-identity",  "lyapunov-threshold",
    "continuum-steady", "ordered-coexistence", "cascade-limit",
    "oracle-agreement", "steady-identity",
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(const std::string& file, const std::string& key, std::string_view value) {
  std::string buf(value);
  errno = 0;
  char* end = nullptr;
  double x = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty() || errno == ERANGE)
    throw ConfigError(file, key, "expected a number, got '" + buf + "'");
  return x;
}

int parse_int(const std::string& file, const std::string& key, std::string_view value) {
  std::string buf(value);
  errno = 0;
  char* end = nullptr;
  long x = std::strtol(buf.c_str(), &end, 10);
  if (end != buf.c_str() + buf.size() || buf.empty() || errno == ERANGE || x > 1'000'000'000 ||
      x < -1'000'000'000)
    throw ConfigError(file, key, "expected an integer, got '" + buf + "'");
  return static_cast<int>(x);
}

std::vector<CheckRequest> parse_checks(const std::string& file, std::string_view value) {
  std::vector<CheckRequest> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    std::string_view token =
        trim(value.substr(start, comma == std::string_view::npos ? comma : comma - start));
    start = comma == std::string_view::npos ? value.size() + 1 : comma + 1;
    if (token.empty()) continue;
    CheckRequest req;
    if (std::size_t colon = token.find(':'); colon != std::string_view::npos) {
      req.name = std::string(trim(token.substr(0, colon)));
      double tol = parse_double(file, "checks", trim(token.substr(colon + 1)));
      if (!(tol > 0.0)) throw ConfigError(file, "checks", "tolerance must be positive");
      req.tolerance = tol;
    } else {
      req.name = std::string(token);
    }
    if (!is_known_check(req.name))
      throw ConfigError(file, "checks", "unknown check name '" + req.name + "'");
    out.push_back(std::move(req));
  }
  return out;
}

}  // namespace

bool is_known_check(const std::string& name) {
  return std::find(known_checks.begin(), known_checks.end(), name) != known_checks.end();
}

Scenario parse_scenario(std::string_view text, const std::string& file_label) {
  Scenario sc;
  std::set<std::string> seen;
  auto mark = [&](const std::string& key, std::initializer_list<const char*> slots) {
    for (const char* slot : slots)
      if (!seen.insert(slot).second) throw ConfigError(file_label, key, "duplicate key");
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        trim(text.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(file_label, std::string(line), "unterminated section header");
      continue;  // sections are organizational only
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(file_label, std::string(line), "expected key = value");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));

    if (key == "name") {
      mark(key, {"name"});
      sc.name = std::string(value);
    } else if (key == "dimension") {
      mark(key, {"dimension"});
      sc.dimension = parse_int(file_label, key, value);
      if (sc.dimension != 1 && sc.dimension != 2)
        throw ConfigError(file_label, key, "dimension must be 1 or 2");
    } else if (key == "extent") {
      mark(key, {"extent_x", "extent_y"});
      sc.extent_x = sc.extent_y = parse_double(file_label, key, value);
    } else if (key == "extent_x") {
      mark(key, {"extent_x"});
      sc.extent_x = parse_double(file_label, key, value);
    } else if (key == "extent_y") {
      mark(key, {"extent_y"});
      sc.extent_y = parse_double(file_label, key, value);
    } else if (key == "nodes") {
      mark(key, {"nodes_x", "nodes_y"});
      sc.nodes_x = sc.nodes_y = parse_int(file_label, key, value);
    } else if (key == "nodes_x") {
      mark(key, {"nodes_x"});
      sc.nodes_x = parse_int(file_label, key, value);
    } else if (key == "nodes_y") {
      mark(key, {"nodes_y"});
      sc.nodes_y = parse_int(file_label, key, value);
    } else if (key == "a") {
      mark(key, {"a"});
      sc.a_source = std::string(value);
    } else if (key == "u0") {
      mark(key, {"u0"});
      sc.u0_source = std::string(value);
    } else if (key == "v0") {
      mark(key, {"v0"});
      sc.v0_source = std::string(value);
    } else if (key == "d") {
      mark(key, {"d"});
      sc.d = parse_double(file_label, key, value);
    } else if (key == "epsilon_v") {
      mark(key, {"epsilon_v"});
      sc.epsilon_v = parse_double(file_label, key, value);
    } else if (key == "dt") {
      mark(key, {"dt"});
      sc.dt = parse_double(file_label, key, value);
    } else if (key == "t_max") {
      mark(key, {"t_max"});
      sc.t_max = parse_double(file_label, key, value);
    } else if (key == "settle_tol") {
      mark(key, {"settle_tol"});
      sc.settle_tol = parse_double(file_label, key, value);
    } else if (key == "cadence") {
      mark(key, {"cadence"});
      sc.cadence = parse_double(file_label, key, value);
    } else if (key == "field_stride") {
      mark(key, {"field_stride"});
      sc.field_stride = parse_int(file_label, key, value);
    } else if (key == "cascade_k_max") {
      mark(key, {"cascade_k_max"});
      sc.cascade_k_max = parse_int(file_label, key, value);
    } else if (key == "checks") {
      mark(key, {"checks"});
      sc.checks = parse_checks(file_label, value);
    } else if (key == "output_dir") {
      mark(key, {"output_dir"});
      sc.output_dir = std::string(value);
    } else {
      throw ConfigError(file_label, key, "unknown key");
    }
  }

  if (sc.name.empty()) throw ConfigError(file_label, "name", "required");
  if (sc.a_source.empty()) throw ConfigError(file_label, "a", "required");
  if (sc.u0_source.empty()) throw ConfigError(file_label, "u0", "required");
  if (sc.v0_source.empty()) throw ConfigError(file_label, "v0", "required");
  if (!(sc.extent_x > 0.0)) throw ConfigError(file_label, "extent_x", "must be positive");
  if (sc.dimension == 2 && !(sc.extent_y > 0.0))
    throw ConfigError(file_label, "extent_y", "must be positive");
  if (sc.nodes_x < 3) throw ConfigError(file_label, "nodes_x", "need at least 3 nodes");
  if (sc.dimension == 2 && sc.nodes_y < 3)
    throw ConfigError(file_label, "nodes_y", "need at least 3 nodes");
  if (sc.d < 0.0) throw ConfigError(file_label, "d", "must be nonnegative");
  if (sc.epsilon_v < 0.0) throw ConfigError(file_label, "epsilon_v", "must be nonnegative");
  if (!(sc.dt > 0.0)) throw ConfigError(file_label, "dt", "must be positive");
  if (!(sc.t_max > 0.0)) throw ConfigError(file_label, "t_max", "must be positive");
  if (sc.settle_tol < 0.0) throw ConfigError(file_label, "settle_tol", "must be nonnegative");
  if (!(sc.cadence > 0.0)) throw ConfigError(file_label, "cadence", "must be positive");
  if (sc.field_stride < 1) throw ConfigError(file_label, "field_stride", "must be at least 1");
  if (sc.cascade_k_max < 1)
    throw ConfigError(file_label, "cascade_k_max", "must be at least 1");
  if (sc.output_dir.empty()) sc.output_dir = "out/" + sc.name;

  for (const auto& [key, source] :
       {std::pair<const char*, const std::string*>{"a", &sc.a_source},
        {"u0", &sc.u0_source},
        {"v0", &sc.v0_source}}) {
    try {
      parse(*source, sc.dimension);
    } catch (const std::runtime_error& e) {
      throw ConfigError(file_label, key, e.what());
    }
  }
  return sc;
}

Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "", "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace lvh
