#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "splitreg/errors.hpp"
#include "splitreg/format.hpp"
#include "splitreg/mspe.hpp"

namespace splitreg {

/// Everything the `curves` command needs, parsed from a flat
/// "[section]" / "key = value" config file. Unknown sections, unknown keys and
/// duplicate keys are hard errors so typos cannot silently fall back to defaults.
struct RunConfig {
  Scenario scenario;
  std::vector<double> beta2_grid;
  std::vector<Method> methods;
  SweepOptions options;
  std::string output = "curves.csv";
};

namespace detail {

struct ConfigEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = value.find(',', start);
    out.push_back(trim(value.substr(start, pos == std::string::npos ? pos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

class ConfigMap {
 public:
  explicit ConfigMap(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
        continue;
      }
      std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      if (section.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                          "' appears before any [section]");
      std::string full = section + "." + key;
      if (entries_.count(full))
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + full + "'");
      entries_[full] = ConfigEntry{value, line_no, false};
    }
  }

  std::optional<std::string> take(const std::string& full_key) {
    auto it = entries_.find(full_key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  void check_all_used() const {
    for (const auto& [key, entry] : entries_)
      if (!entry.used)
        throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + key + "'");
  }

 private:
  std::map<std::string, ConfigEntry> entries_;
};

inline double take_double(ConfigMap& map, const std::string& key, double fallback) {
  auto v = map.take(key);
  return v ? parse_double(*v, "config key '" + key + "'") : fallback;
}

inline long long take_int(ConfigMap& map, const std::string& key, long long fallback) {
  auto v = map.take(key);
  return v ? parse_int(*v, "config key '" + key + "'") : fallback;
}

inline bool take_bool(ConfigMap& map, const std::string& key, bool fallback) {
  auto v = map.take(key);
  if (!v) return fallback;
  if (*v == "true") return true;
  if (*v == "false") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + *v + "'");
}

inline std::vector<double> log_spaced(double lo, double hi, int points, bool descending,
                                      const std::string& context) {
  try {
    return log_spaced_grid(lo, hi, points, descending);
  } catch (const ParameterError& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& text) {
  detail::ConfigMap map(text);
  RunConfig cfg;

  Scenario& sc = cfg.scenario;
  sc.n = static_cast<int>(detail::take_int(map, "scenario.n", 10));
  sc.d = static_cast<int>(detail::take_int(map, "scenario.d", 2));
  sc.beta1 = detail::take_double(map, "scenario.beta1", 1.0);
  sc.k = static_cast<int>(detail::take_int(map, "scenario.k", sc.d == 2 ? 1 : 2));
  sc.snr = detail::take_double(map, "scenario.snr", 1.0);
  sc.r = detail::take_double(map, "scenario.r", 0.0);
  sc.rho = detail::take_double(map, "scenario.rho", 0.0);
  sc.num_train = static_cast<int>(detail::take_int(map, "scenario.num_train", 200));
  sc.num_test = static_cast<int>(detail::take_int(map, "scenario.num_test", 500));
  long long seed = detail::take_int(map, "scenario.seed", 1);
  if (seed < 0) throw ConfigError("config key 'scenario.seed': must be >= 0");
  sc.seed = static_cast<std::uint64_t>(seed);

  auto beta2_list = map.take("sweep.beta2_list");
  auto beta2_min = map.take("sweep.beta2_min");
  auto beta2_max = map.take("sweep.beta2_max");
  auto beta2_points = map.take("sweep.beta2_points");
  if (beta2_list && (beta2_min || beta2_max || beta2_points))
    throw ConfigError("sweep: give either beta2_list or beta2_min/max/points, not both");
  if (beta2_list) {
    for (const auto& token : detail::split_list(*beta2_list))
      cfg.beta2_grid.push_back(parse_double(token, "config key 'sweep.beta2_list'"));
  } else {
    double lo = beta2_min ? parse_double(*beta2_min, "config key 'sweep.beta2_min'") : -2.0;
    double hi = beta2_max ? parse_double(*beta2_max, "config key 'sweep.beta2_max'") : 2.0;
    long long pts = beta2_points ? parse_int(*beta2_points, "config key 'sweep.beta2_points'") : 21;
    if (pts < 1) throw ConfigError("config key 'sweep.beta2_points': must be >= 1");
    if (pts == 1 && lo != hi)
      throw ConfigError("sweep: a single beta2 point needs beta2_min = beta2_max");
    for (long long i = 0; i < pts; ++i) {
      double t = pts == 1 ? 0.0 : static_cast<double>(i) / (pts - 1);
      cfg.beta2_grid.push_back(lo + t * (hi - lo));
    }
  }

  auto methods = map.take("sweep.methods");
  if (!methods) throw ConfigError("config: 'sweep.methods' is required");
  for (const auto& token : detail::split_list(*methods)) {
    try {
      cfg.methods.push_back(parse_method(token));
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("config key 'sweep.methods': ") + e.what());
    }
  }
  cfg.options.closed_form_d2 = detail::take_bool(map, "sweep.closed_form", true);
  long long jobs = detail::take_int(map, "sweep.jobs", 1);
  if (jobs < 1) throw ConfigError("config key 'sweep.jobs': must be >= 1");
  cfg.options.jobs = static_cast<int>(jobs);

  TuningGrid defaults = TuningGrid::defaults(sc.n);
  double lambda_lo = detail::take_double(map, "grid.lambda_min", 1e-4 * sc.n);
  double lambda_hi = detail::take_double(map, "grid.lambda_max", 1e3 * sc.n);
  int lambda_points = static_cast<int>(detail::take_int(map, "grid.lambda_points", 50));
  cfg.options.grid.lambda =
      detail::log_spaced(lambda_lo, lambda_hi, lambda_points, true, "grid.lambda");
  auto alphas = map.take("grid.alpha");
  if (alphas) {
    for (const auto& token : detail::split_list(*alphas))
      cfg.options.grid.alpha.push_back(parse_double(token, "config key 'grid.alpha'"));
  } else {
    cfg.options.grid.alpha = defaults.alpha;
  }
  double ld_lo = detail::take_double(map, "grid.lambda_d_min", 1e-3);
  double ld_hi = detail::take_double(map, "grid.lambda_d_max", 1e2);
  int ld_points = static_cast<int>(detail::take_int(map, "grid.lambda_d_points", 20));
  cfg.options.grid.lambda_d = {0.0};
  if (ld_points > 0) {
    std::vector<double> tail =
        detail::log_spaced(ld_lo, ld_hi, ld_points, false, "grid.lambda_d");
    cfg.options.grid.lambda_d.insert(cfg.options.grid.lambda_d.end(), tail.begin(), tail.end());
  }

  long long groups = detail::take_int(map, "splitreg.groups", 2);
  if (groups < 1) throw ConfigError("config key 'splitreg.groups': must be >= 1");
  cfg.options.splitreg_groups = static_cast<int>(groups);

  auto output = map.take("output.path");
  if (output) {
    if (output->empty()) throw ConfigError("config key 'output.path': must not be empty");
    cfg.output = *output;
  }

  map.check_all_used();

  // Validate everything up front: grids, then every beta2 point of the scenario.
  try {
    cfg.options.grid.validate();
    if (cfg.beta2_grid.empty()) throw ParameterError("sweep: empty beta2 grid");
    for (double beta2 : cfg.beta2_grid) {
      Scenario point = sc;
      point.beta2 = beta2;
      validate_scenario(point);
      scenario_sigma2(point);
    }
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config validation: ") + e.what());
  }
  return cfg;
}

/// The effective configuration (defaults resolved), one "section.key = value"
/// line each - echoed into output headers so a run can be reproduced from its
/// own output file.
inline std::vector<std::string> echo_config(const RunConfig& cfg) {
  std::vector<std::string> lines;
  auto add = [&](const std::string& key, const std::string& value) {
    lines.push_back(key + " = " + value);
  };
  const Scenario& sc = cfg.scenario;
  add("scenario.n", std::to_string(sc.n));
  add("scenario.d", std::to_string(sc.d));
  add("scenario.beta1", format_double(sc.beta1));
  add("scenario.k", std::to_string(sc.k));
  add("scenario.snr", format_double(sc.snr));
  add("scenario.r", format_double(sc.r));
  add("scenario.rho", format_double(sc.rho));
  add("scenario.num_train", std::to_string(sc.num_train));
  add("scenario.num_test", std::to_string(sc.num_test));
  add("scenario.seed", std::to_string(sc.seed));
  std::string beta2_list;
  for (std::size_t i = 0; i < cfg.beta2_grid.size(); ++i) {
    if (i > 0) beta2_list += ',';
    beta2_list += format_double(cfg.beta2_grid[i]);
  }
  add("sweep.beta2_list", beta2_list);
  std::string methods;
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
    if (i > 0) methods += ',';
    methods += std::string(method_name(cfg.methods[i]));
  }
  add("sweep.methods", methods);
  add("sweep.closed_form", cfg.options.closed_form_d2 ? "true" : "false");
  add("sweep.jobs", std::to_string(cfg.options.jobs));
  const TuningGrid& grid = cfg.options.grid;
  add("grid.lambda_min", format_double(grid.lambda.back()));
  add("grid.lambda_max", format_double(grid.lambda.front()));
  add("grid.lambda_points", std::to_string(grid.lambda.size()));
  std::string alphas;
  for (std::size_t i = 0; i < grid.alpha.size(); ++i) {
    if (i > 0) alphas += ',';
    alphas += format_double(grid.alpha[i]);
  }
  add("grid.alpha", alphas);
  if (grid.lambda_d.size() > 1) {
    add("grid.lambda_d_min", format_double(grid.lambda_d[1]));
    add("grid.lambda_d_max", format_double(grid.lambda_d.back()));
  }
  add("grid.lambda_d_points", std::to_string(grid.lambda_d.size() - 1));
  add("splitreg.groups", std::to_string(cfg.options.splitreg_groups));
  add("output.path", cfg.output);
  return lines;
}

}  // namespace splitreg
