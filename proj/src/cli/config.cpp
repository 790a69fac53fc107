#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ewb/cli.hpp"

namespace ewb::cli {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "n",     "epsilon", "k",     "q",     "s",     "topology", "grid-size", "tol",      "out",   "seed",
      "a0",    "c-gap",   "g2",    "a-min", "a-max", "c-min",    "c-max",     "cells",    "profiles",
      "points", "certificate"};
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_known(const std::string& key) {
  const auto& k = known_keys();
  return std::find(k.begin(), k.end(), key) != k.end();
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

double positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError("config key '" + key + "' must be positive");
  return v;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(number) + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!is_known(key)) throw ConfigError(origin + ":" + std::to_string(number) + ": unknown config key '" + key + "'");
    if (value.empty()) throw ConfigError(origin + ":" + std::to_string(number) + ": config key '" + key + "' has no value");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

RunConfig build_run_config(const std::string& command, const std::map<std::string, std::string>& file_values,
                           const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> kv = {{"n", "2"}, {"epsilon", "1"}, {"k", "1"}, {"q", "2"},
                                           {"topology", "sphere-bundle"}};
  for (const auto& [k, v] : file_values) kv[k] = v;
  for (const auto& [k, v] : overrides) {
    if (!is_known(k)) throw ConfigError("unknown option '" + k + "'");
    kv[k] = v;
  }

  RunConfig cfg;
  cfg.command = command;
  cfg.tol = command == "check-formulas" ? 1e-6 : 1e-10;
  try {
    cfg.spec = validate_bundle_spec(raw_from_key_values(kv));
  } catch (const SpecRejected& e) {
    throw ConfigError(std::string("invalid bundle: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto num = [&](const char* key, double& field) {
    if (auto it = kv.find(key); it != kv.end()) field = to_double(key, it->second);
  };
  auto integer = [&](const char* key, int& field) {
    if (auto it = kv.find(key); it != kv.end()) field = static_cast<int>(to_integer(key, it->second));
  };
  integer("grid-size", cfg.grid_size);
  num("tol", cfg.tol);
  num("a0", cfg.a0);
  num("c-gap", cfg.c_gap);
  num("g2", cfg.g2);
  num("a-min", cfg.a_min);
  num("a-max", cfg.a_max);
  num("c-min", cfg.c_min);
  num("c-max", cfg.c_max);
  integer("cells", cfg.cells);
  integer("profiles", cfg.profiles);
  integer("points", cfg.points);
  if (auto it = kv.find("seed"); it != kv.end()) {
    const long long s = to_integer("seed", it->second);
    if (s < 0) throw ConfigError("config key 'seed' must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (auto it = kv.find("out"); it != kv.end()) cfg.out_dir = it->second;
  if (auto it = kv.find("certificate"); it != kv.end()) cfg.certificate = it->second;

  positive("tol", cfg.tol);
  positive("a0", cfg.a0);
  positive("g2", cfg.g2);
  if (!(cfg.c_gap >= 0.0)) throw ConfigError("config key 'c-gap' must be non-negative");
  if (cfg.grid_size < 8) throw ConfigError("config key 'grid-size' must be at least 8");
  if (cfg.profiles < 1) throw ConfigError("config key 'profiles' must be at least 1");
  if (cfg.points < 2) throw ConfigError("config key 'points' must be at least 2");

  // Echo every effective value, including defaults.
  cfg.effective = kv;
  auto echo = [&cfg](const char* key, auto value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    cfg.effective[key] = os.str();
  };
  echo("grid-size", cfg.grid_size);
  echo("tol", cfg.tol);
  echo("seed", cfg.seed);
  echo("a0", cfg.a0);
  echo("c-gap", cfg.c_gap);
  echo("g2", cfg.g2);
  echo("a-min", cfg.a_min);
  echo("a-max", cfg.a_max);
  echo("c-min", cfg.c_min);
  echo("c-max", cfg.c_max);
  echo("cells", cfg.cells);
  echo("profiles", cfg.profiles);
  echo("points", cfg.points);
  cfg.effective["out"] = cfg.out_dir;
  cfg.effective["s"] = cfg.spec.s.str();
  if (!cfg.certificate.empty()) cfg.effective["certificate"] = cfg.certificate;
  return cfg;
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : cfg.effective) j[k] = v;
  return j;
}

}  // namespace ewb::cli
