#pragma once

// Flat `key = value` configuration files for the sweep harness. Keys mirror
// the notation table; unknown or duplicate keys are errors so that a typo
// cannot silently fall back to a default. Lists are comma-separated. Lines
// starting with '#' and blank lines are ignored.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsma/sweep.hpp"

namespace rsma {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) parts.push_back(trim(item));
  return parts;
}

inline double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config: key '" + key + "': cannot parse '" + s + "' as a number");
  }
}

inline long long parse_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config: key '" + key + "': cannot parse '" + s + "' as an integer");
  }
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config: key '" + key + "': cannot parse '" + s + "' as an unsigned integer");
  }
}

inline Vec3 parse_vec3(const std::string& s, const std::string& key) {
  const auto parts = split_list(s);
  if (parts.size() != 3)
    throw ConfigError("config: key '" + key + "' needs three comma-separated coordinates");
  return {parse_double(parts[0], key), parse_double(parts[1], key), parse_double(parts[2], key)};
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "rsma") return Scheme::Rsma;
  if (s == "sdma") return Scheme::Sdma;
  if (s == "noma") return Scheme::Noma;
  throw ConfigError("config: unknown scheme '" + s + "' (expected rsma, sdma or noma)");
}

inline PlacementVariant parse_strategy(const std::string& s) {
  if (s == "dist_avg") return PlacementVariant::DistAvg;
  if (s == "channel_stat") return PlacementVariant::ChannelStat;
  if (s == "random_on_segment") return PlacementVariant::RandomOnSegment;
  if (s == "iterative_search") return PlacementVariant::IterativeSearch;
  throw ConfigError("config: unknown placement strategy '" + s + "'");
}

}  // namespace detail

inline SweepSpec parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    if (!kv.emplace(key, value).second)
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }

  static const char* kKnownKeys[] = {
      "n_antennas", "user1_xyz", "user2_xyz",    "abs_altitude_m", "snr_db_list",
      "sigma2",     "bandwidth_hz", "weights",   "r_th_list",      "schemes",
      "strategies", "realizations", "grid_l",    "plos_a",         "plos_b",
      "k0_db",      "k90_db",       "beta0",     "alpha",          "seed"};
  for (const auto& [key, value] : kv) {
    bool known = false;
    for (const char* k : kKnownKeys) known = known || key == k;
    if (!known) throw ConfigError("config: unknown key '" + key + "'");
  }
  auto require = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError(std::string("config: missing key '") + key + "'");
    return it->second;
  };

  SweepSpec spec;
  spec.n_antennas = static_cast<int>(detail::parse_int(require("n_antennas"), "n_antennas"));
  spec.user_positions[0] = detail::parse_vec3(require("user1_xyz"), "user1_xyz");
  spec.user_positions[1] = detail::parse_vec3(require("user2_xyz"), "user2_xyz");
  spec.abs_altitude_m = detail::parse_double(require("abs_altitude_m"), "abs_altitude_m");
  spec.snr_db_list.clear();
  for (const auto& s : detail::split_list(require("snr_db_list")))
    spec.snr_db_list.push_back(detail::parse_double(s, "snr_db_list"));
  spec.sigma2 = detail::parse_double(require("sigma2"), "sigma2");
  spec.bandwidth_hz = detail::parse_double(require("bandwidth_hz"), "bandwidth_hz");
  {
    const auto parts = detail::split_list(require("weights"));
    if (parts.size() != 2) throw ConfigError("config: 'weights' needs two values");
    spec.user_weights = {detail::parse_double(parts[0], "weights"),
                         detail::parse_double(parts[1], "weights")};
  }
  spec.r_th_list.clear();
  for (const auto& s : detail::split_list(require("r_th_list")))
    spec.r_th_list.push_back(detail::parse_double(s, "r_th_list"));
  spec.schemes.clear();
  for (const auto& s : detail::split_list(require("schemes")))
    spec.schemes.push_back(detail::parse_scheme(s));
  spec.strategies.clear();
  for (const auto& s : detail::split_list(require("strategies")))
    spec.strategies.push_back(detail::parse_strategy(s));
  spec.realizations = static_cast<int>(detail::parse_int(require("realizations"), "realizations"));
  spec.grid_l = static_cast<int>(detail::parse_int(require("grid_l"), "grid_l"));
  spec.env.plos_a = detail::parse_double(require("plos_a"), "plos_a");
  spec.env.plos_b = detail::parse_double(require("plos_b"), "plos_b");
  spec.env.k0_db = detail::parse_double(require("k0_db"), "k0_db");
  spec.env.k90_db = detail::parse_double(require("k90_db"), "k90_db");
  spec.env.beta0 = detail::parse_double(require("beta0"), "beta0");
  {
    const std::string& alpha = require("alpha");
    if (alpha == "angle_dependent")
      spec.env.alpha_fixed.reset();
    else
      spec.env.alpha_fixed = detail::parse_double(alpha, "alpha");
  }
  spec.seed = detail::parse_u64(require("seed"), "seed");

  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return spec;
}

inline SweepSpec load_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace rsma
