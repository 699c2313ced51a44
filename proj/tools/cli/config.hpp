#pragma once

// Run configuration: a flat `key = value` file with dotted keys, `#`
// comments, and per-key overrides from the command line.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twophoton/model.hpp"

namespace twophoton::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PulseKind { rectangular, gaussian, file };

struct PulseConfig {
  PulseKind kind = PulseKind::rectangular;
  double length = 20.0;
  double center = 10.0;
  double width = 2.0;  // rms width of |psi|^2
  std::string path;
  bool length_given = false;
};

struct GridConfig {
  double x_min = -10.0;
  double x_max = 20.0;
  std::size_t n = 512;
  bool explicit_range = false;  // x_min or x_max given by the user
};

struct RunConfig {
  PhysicalParams params;
  PulseConfig pulse;
  GridConfig grid;
  double anchor_x = 10.0;
  double tau_min = -10.0;
  double tau_max = 10.0;
  std::size_t tau_n = 2001;
  std::string g2_grid;                 // saved two-photon CSV to read instead of simulating
  std::string g2_normalization = "long_pulse";
  double oracle_dx = 0.01;
  std::string oracle_mode = "two";
  bool oracle_write_field = false;
  std::string out = "out";
  double check_tolerance = -1.0;       // < 0: command default

  /// Flattened key/value view, sorted by key; used for manifests and CSV
  /// headers.
  std::map<std::string, std::string> entries;
};

/// Keys accepted in files and as --key overrides.
inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "gamma",          "c",         "pulse.kind",         "pulse.length",    "pulse.center",
      "pulse.width",    "pulse.path", "grid.x_min",        "grid.x_max",      "grid.n",
      "anchor_x",       "tau.min",   "tau.max",            "tau.n",           "g2.grid",
      "g2.normalization", "oracle.dx", "oracle.mode",      "oracle.write_field", "out",
      "check.tolerance"};
  return keys;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool is_known_key(const std::string& k) {
  for (const auto& x : known_keys())
    if (x == k) return true;
  return false;
}

/// Parses `key = value` lines. Unknown keys and malformed lines are errors.
inline std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin = "config") {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!is_known_key(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

/// Folds `--key value` / `--key=value` pairs into kv.
inline void apply_overrides(std::map<std::string, std::string>& kv, const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string a = args[i];
    if (a.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + a + "'");
    a = a.substr(2);
    std::string key, value;
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      key = a.substr(0, eq);
      value = a.substr(eq + 1);
    } else {
      key = a;
      if (i + 1 >= args.size()) throw ConfigError("override --" + key + " needs a value");
      value = args[++i];
    }
    if (!is_known_key(key)) throw ConfigError("unknown option --" + key);
    kv[key] = trim(value);
  }
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(d)) throw ConfigError(key + ": not a finite number: '" + v + "'");
  return d;
}

inline std::size_t to_count(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long n = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || n < 0) throw ConfigError(key + ": not a non-negative integer: '" + v + "'");
  return static_cast<std::size_t>(n);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false");
}

inline void require_positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key + " must be positive");
}

}  // namespace detail

/// Builds a validated RunConfig. Grid and anchor defaults follow the pulse
/// when not given explicitly.
inline RunConfig build_config(const std::map<std::string, std::string>& kv) {
  RunConfig r;
  auto has = [&](const char* k) { return kv.count(k) != 0; };
  auto num = [&](const char* k, double& dst) {
    if (has(k)) dst = detail::to_double(k, kv.at(k));
  };
  num("gamma", r.params.gamma);
  num("c", r.params.c);
  detail::require_positive("gamma", r.params.gamma);
  detail::require_positive("c", r.params.c);

  if (has("pulse.kind")) {
    const auto& k = kv.at("pulse.kind");
    if (k == "rectangular") r.pulse.kind = PulseKind::rectangular;
    else if (k == "gaussian") r.pulse.kind = PulseKind::gaussian;
    else if (k == "file") r.pulse.kind = PulseKind::file;
    else throw ConfigError("pulse.kind must be rectangular, gaussian or file");
  }
  num("pulse.length", r.pulse.length);
  r.pulse.length_given = has("pulse.length");
  num("pulse.center", r.pulse.center);
  num("pulse.width", r.pulse.width);
  if (has("pulse.path")) r.pulse.path = kv.at("pulse.path");
  if (r.pulse.kind == PulseKind::rectangular) detail::require_positive("pulse.length", r.pulse.length);
  if (r.pulse.kind == PulseKind::gaussian) detail::require_positive("pulse.width", r.pulse.width);
  if (r.pulse.kind == PulseKind::file && r.pulse.path.empty()) throw ConfigError("pulse.kind = file needs pulse.path");

  // grid defaults: [support_min - 10 c/gamma, support_max] for the built-in pulses
  const double ell = r.params.relaxation_length();
  if (r.pulse.kind == PulseKind::rectangular) {
    r.grid.x_min = -10.0 * ell;
    r.grid.x_max = r.pulse.length;
    r.anchor_x = 0.5 * r.pulse.length;
  } else if (r.pulse.kind == PulseKind::gaussian) {
    r.grid.x_min = r.pulse.center - 6.0 * r.pulse.width - 10.0 * ell;
    r.grid.x_max = r.pulse.center + 6.0 * r.pulse.width;
    r.anchor_x = r.pulse.center;
  }
  num("grid.x_min", r.grid.x_min);
  num("grid.x_max", r.grid.x_max);
  r.grid.explicit_range = has("grid.x_min") || has("grid.x_max");
  if (has("grid.n")) r.grid.n = detail::to_count("grid.n", kv.at("grid.n"));
  if (!(r.grid.x_min < r.grid.x_max)) throw ConfigError("grid.x_min must be below grid.x_max");
  if (r.grid.n < 2) throw ConfigError("grid.n must be at least 2");

  num("anchor_x", r.anchor_x);
  num("tau.min", r.tau_min);
  num("tau.max", r.tau_max);
  if (has("tau.n")) r.tau_n = detail::to_count("tau.n", kv.at("tau.n"));
  if (!(r.tau_min < r.tau_max) || r.tau_n < 2) throw ConfigError("need tau.min < tau.max and tau.n >= 2");
  if (has("g2.grid")) r.g2_grid = kv.at("g2.grid");
  if (has("g2.normalization")) {
    r.g2_normalization = kv.at("g2.normalization");
    if (r.g2_normalization != "long_pulse" && r.g2_normalization != "local")
      throw ConfigError("g2.normalization must be long_pulse or local");
  }

  num("oracle.dx", r.oracle_dx);
  detail::require_positive("oracle.dx", r.oracle_dx);
  if (has("oracle.mode")) {
    r.oracle_mode = kv.at("oracle.mode");
    if (r.oracle_mode != "one" && r.oracle_mode != "two") throw ConfigError("oracle.mode must be one or two");
  }
  if (has("oracle.write_field")) r.oracle_write_field = detail::to_bool("oracle.write_field", kv.at("oracle.write_field"));
  if (has("out")) r.out = kv.at("out");
  if (r.out.empty()) throw ConfigError("out must not be empty");
  num("check.tolerance", r.check_tolerance);
  if (has("check.tolerance")) detail::require_positive("check.tolerance", r.check_tolerance);

  // resolved view, for manifests
  auto fmt = [](double d) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
  };
  const char* kinds[] = {"rectangular", "gaussian", "file"};
  auto& e = r.entries;
  e["gamma"] = fmt(r.params.gamma);
  e["c"] = fmt(r.params.c);
  e["pulse.kind"] = kinds[static_cast<int>(r.pulse.kind)];
  if (r.pulse.kind == PulseKind::rectangular || r.pulse.length_given) e["pulse.length"] = fmt(r.pulse.length);
  if (r.pulse.kind == PulseKind::gaussian) {
    e["pulse.center"] = fmt(r.pulse.center);
    e["pulse.width"] = fmt(r.pulse.width);
  }
  if (r.pulse.kind == PulseKind::file) e["pulse.path"] = r.pulse.path;
  e["grid.x_min"] = fmt(r.grid.x_min);
  e["grid.x_max"] = fmt(r.grid.x_max);
  e["grid.n"] = std::to_string(r.grid.n);
  e["anchor_x"] = fmt(r.anchor_x);
  e["tau.min"] = fmt(r.tau_min);
  e["tau.max"] = fmt(r.tau_max);
  e["tau.n"] = std::to_string(r.tau_n);
  e["g2.normalization"] = r.g2_normalization;
  if (!r.g2_grid.empty()) e["g2.grid"] = r.g2_grid;
  e["oracle.dx"] = fmt(r.oracle_dx);
  e["oracle.mode"] = r.oracle_mode;
  e["out"] = r.out;
  if (r.check_tolerance > 0.0) e["check.tolerance"] = fmt(r.check_tolerance);
  return r;
}

}  // namespace twophoton::cli
