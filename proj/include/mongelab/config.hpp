#pragma once
// Experiment configuration: a small key = value grammar with [section]
// headers, '#' comments, provenance tracking, environment overrides, and
// upfront validation of every parameter against module preconditions.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mongelab/field.hpp"

namespace mongelab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string experiment;
  std::string setting = "real";  // real | complex
  int n = 3, k = 1;
  int dim = 3;                   // ambient dimension for dichotomy / sections corpora
  std::string family = "auto";   // auto | ode-exact | power-quadratic
  double p = -1.0;               // <= 0: derived from (setting, n, k)
  std::vector<double> multipliers = {0.9, 1.0};
  int budget = 50000;
  int annuli = 8;
  double r_outer = -1.0;  // <= 0: per-family default
  std::uint64_t seed = 20260823;
  std::string out_dir = "out";
  std::string tier = "full";  // smoke | full
  double norm_budget = 0.0;   // optional recorded norm budget (metadata only)
  std::vector<double> eps = {0.05, 0.1};
  std::vector<double> heights = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1};
  std::vector<double> radii = {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  int count = 200;
  int pieces = 8;
  double gauge_m = 3.0, gauge_s = 0.0;

  /// Where each key's value came from: "file:line", "env", "cli" or absent
  /// (default).
  std::map<std::string, std::string> provenance;

  Field::Setting field_setting() const {
    if (setting == "real") return Field::Setting::Real;
    if (setting == "complex") return Field::Setting::Complex;
    throw ConfigError("setting must be 'real' or 'complex' (got '" + setting + "')");
  }

  bool explicit_key(const std::string& key) const { return provenance.count(key) > 0; }

  void validate() const {
    static const std::vector<std::string> experiments = {
        "pogorelov-solve", "annulus-profile", "growth-fit", "dichotomy",
        "sections",        "orlicz",          "sharpness",  "verify-all"};
    (void)field_setting();
    const bool family_experiment = experiment == "annulus-profile" || experiment == "growth-fit" ||
                                   experiment == "orlicz" || experiment == "sharpness" ||
                                   experiment == "pogorelov-solve";
    if (family_experiment || explicit_key("n") || explicit_key("k")) {
      if (setting == "real") {
        if (!(k >= 1 && 2 * k < n))
          throw ConfigError("precondition violated: real setting requires k < n/2 (n = " +
                            std::to_string(n) + ", k = " + std::to_string(k) + ")");
      } else {
        if (!(k >= 1 && k < n))
          throw ConfigError("precondition violated: complex setting requires 1 <= k < n (n = " +
                            std::to_string(n) + ", k = " + std::to_string(k) + ")");
      }
    }
    if (experiment.empty()) throw ConfigError("missing experiment");
    bool known = false;
    for (const auto& e : experiments) known = known || e == experiment;
    if (!known) throw ConfigError("unknown experiment '" + experiment + "'");
    if (dim < 2 || dim > 6) throw ConfigError("dim must be in [2, 6]");
    if (budget < 100) throw ConfigError("budget must be >= 100");
    if (annuli < 1) throw ConfigError("annuli must be >= 1");
    if (tier != "smoke" && tier != "full")
      throw ConfigError("tier must be 'smoke' or 'full' (got '" + tier + "')");
    if (family != "auto" && family != "ode-exact" && family != "power-quadratic")
      throw ConfigError("family must be auto, ode-exact or power-quadratic");
    if (explicit_key("p") && !(p > 0.0)) throw ConfigError("p must be positive");
    if (count < 1) throw ConfigError("count must be >= 1");
    if (pieces < dim + 1) throw ConfigError("pieces must be >= dim + 1");
    for (double m : multipliers)
      if (!(m > 0.0)) throw ConfigError("multipliers must be positive");
    for (double e : eps)
      if (!(e > 0.0 && e < 1.0)) throw ConfigError("eps values must be in (0, 1)");
    for (double h : heights)
      if (!(h > 0.0)) throw ConfigError("heights must be positive");
    for (double r : radii)
      if (!(r > 0.0)) throw ConfigError("radii must be positive");
    if (!(gauge_m > 0.0)) throw ConfigError("gauge_m must be positive");
  }

  /// Fully resolved key -> value map (defaults included) for report embedding.
  std::map<std::string, std::string> resolved() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

struct ConfigKey {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

inline double parse_double(const std::string& v) {
  std::size_t pos = 0;
  double x = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("trailing characters");
  return x;
}

inline long long parse_int(const std::string& v) {
  std::size_t pos = 0;
  long long x = std::stoll(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("trailing characters");
  return x;
}

inline std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

inline const std::map<std::string, ConfigKey>& config_keys() {
  auto str_key = [](std::string ExperimentConfig::* f) {
    return ConfigKey{[f](ExperimentConfig& c, const std::string& v) { c.*f = v; },
                     [f](const ExperimentConfig& c) { return c.*f; }};
  };
  auto int_key = [](int ExperimentConfig::* f) {
    return ConfigKey{
        [f](ExperimentConfig& c, const std::string& v) { c.*f = static_cast<int>(parse_int(v)); },
        [f](const ExperimentConfig& c) { return std::to_string(c.*f); }};
  };
  auto dbl_key = [](double ExperimentConfig::* f) {
    return ConfigKey{[f](ExperimentConfig& c, const std::string& v) { c.*f = parse_double(v); },
                     [f](const ExperimentConfig& c) { return format_double(c.*f); }};
  };
  auto list_key = [](std::vector<double> ExperimentConfig::* f) {
    return ConfigKey{[f](ExperimentConfig& c, const std::string& v) { c.*f = parse_list(v); },
                     [f](const ExperimentConfig& c) { return join_doubles(c.*f); }};
  };
  static const std::map<std::string, ConfigKey> keys = {
      {"experiment", str_key(&ExperimentConfig::experiment)},
      {"setting", str_key(&ExperimentConfig::setting)},
      {"n", int_key(&ExperimentConfig::n)},
      {"k", int_key(&ExperimentConfig::k)},
      {"dim", int_key(&ExperimentConfig::dim)},
      {"family", str_key(&ExperimentConfig::family)},
      {"p", dbl_key(&ExperimentConfig::p)},
      {"multipliers", list_key(&ExperimentConfig::multipliers)},
      {"budget", int_key(&ExperimentConfig::budget)},
      {"annuli", int_key(&ExperimentConfig::annuli)},
      {"r_outer", dbl_key(&ExperimentConfig::r_outer)},
      {"seed", ConfigKey{[](ExperimentConfig& c, const std::string& v) {
                           std::size_t pos = 0;
                           c.seed = std::stoull(v, &pos);
                           if (pos != v.size()) throw std::invalid_argument("trailing characters");
                         },
                         [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
      {"out", str_key(&ExperimentConfig::out_dir)},
      {"tier", str_key(&ExperimentConfig::tier)},
      {"norm_budget", dbl_key(&ExperimentConfig::norm_budget)},
      {"eps", list_key(&ExperimentConfig::eps)},
      {"heights", list_key(&ExperimentConfig::heights)},
      {"radii", list_key(&ExperimentConfig::radii)},
      {"count", int_key(&ExperimentConfig::count)},
      {"pieces", int_key(&ExperimentConfig::pieces)},
      {"gauge_m", dbl_key(&ExperimentConfig::gauge_m)},
      {"gauge_s", dbl_key(&ExperimentConfig::gauge_s)},
  };
  return keys;
}

}  // namespace detail

inline std::map<std::string, std::string> ExperimentConfig::resolved() const {
  std::map<std::string, std::string> out;
  for (const auto& [key, handlers] : detail::config_keys()) out[key] = handlers.get(*this);
  return out;
}

/// Parse the documented grammar: '#' comments, [section] headers (experiment,
/// quadrature, run, gauge), comma- or newline-separated `key = value`
/// assignments, space-separated numeric lists.  Unknown keys and sections are
/// rejected with their line number.  `validate_after` is disabled by callers
/// that inject further overrides (environment, command line) before checking.
inline ExperimentConfig parse_config(const std::string& text,
                                     const std::string& filename = "<config>",
                                     bool validate_after = true) {
  static const std::vector<std::string> sections = {"experiment", "quadrature", "run", "gauge"};
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(filename + ":" + std::to_string(lineno) + ": unterminated [section]");
      std::string name = detail::trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const auto& s : sections) known = known || s == name;
      if (!known)
        throw ConfigError(filename + ":" + std::to_string(lineno) + ": unknown section '" + name +
                          "'");
      continue;
    }
    std::istringstream frags(line);
    std::string frag;
    while (std::getline(frags, frag, ',')) {
      frag = detail::trim(frag);
      if (frag.empty()) continue;
      auto eq = frag.find('=');
      if (eq == std::string::npos)
        throw ConfigError(filename + ":" + std::to_string(lineno) +
                          ": expected key = value, got '" + frag + "'");
      std::string key = detail::trim(frag.substr(0, eq));
      std::string value = detail::trim(frag.substr(eq + 1));
      if (key.empty() || value.empty())
        throw ConfigError(filename + ":" + std::to_string(lineno) + ": empty key or value");
      auto it = detail::config_keys().find(key);
      if (it == detail::config_keys().end())
        throw ConfigError(filename + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
      if (cfg.provenance.count(key))
        throw ConfigError(filename + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                          "'");
      try {
        it->second.set(cfg, value);
      } catch (const std::exception&) {
        throw ConfigError(filename + ":" + std::to_string(lineno) + ": invalid value '" + value +
                          "' for key '" + key + "'");
      }
      cfg.provenance[key] = filename + ":" + std::to_string(lineno);
    }
  }
  if (validate_after) cfg.validate();
  return cfg;
}

/// Environment overrides: MONGELAB_<KEY> (upper-cased key) replaces the file
/// value; precedence is file < environment < command line.
inline void apply_env_overrides(ExperimentConfig& cfg) {
  for (const auto& [key, handlers] : detail::config_keys()) {
    std::string env_name = "MONGELAB_";
    for (char c : key) env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const char* value = std::getenv(env_name.c_str());
    if (!value) continue;
    try {
      handlers.set(cfg, value);
    } catch (const std::exception&) {
      throw ConfigError("invalid value '" + std::string(value) + "' in environment variable " +
                        env_name);
    }
    cfg.provenance[key] = "env";
  }
}

}  // namespace mongelab
