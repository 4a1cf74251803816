#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "ptkr/core.hpp"
#include "ptkr/experiments/table.hpp"

namespace ptkr::experiments {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Flat string key/value settings with typed accessors.
///
/// Every accessor marks its key as consumed; `reject_unused()` then catches
/// typos in config files that would otherwise be silently ignored.
class Config {
 public:
  Config() = default;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  [[nodiscard]] bool has(const std::string& key) const { return values_.contains(key); }
  [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

  /// Merges `other` on top of this config.
  void overlay(const Config& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
  }

  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  [[nodiscard]] double get_double(const std::string& key, double fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return parse_real(it->second);
    } catch (const Error&) {
      throw ConfigError("'" + key + "' expects a number, got '" + it->second + "'");
    }
  }

  [[nodiscard]] int get_int(const std::string& key, int fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      const auto v = parse_integer(it->second);
      if (v < INT32_MIN || v > INT32_MAX) throw Error("range");
      return static_cast<int>(v);
    } catch (const Error&) {
      throw ConfigError("'" + key + "' expects an integer, got '" + it->second + "'");
    }
  }

  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("'" + key + "' expects true/false, got '" + v + "'");
  }

  /// Comma-separated reals.
  [[nodiscard]] std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::string item;
    std::istringstream is(it->second);
    while (std::getline(is, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        out.push_back(parse_real(item));
      } catch (const Error&) {
        throw ConfigError("'" + key + "' expects a comma-separated list of numbers, got '" + it->second + "'");
      }
    }
    if (out.empty()) throw ConfigError("'" + key + "' is an empty list");
    return out;
  }

  void reject_unused() const {
    for (const auto& [k, v] : values_)
      if (!used_.contains(k)) throw ConfigError("unknown setting '" + k + "'");
  }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

/// Reads `key = value` lines; blank lines and lines starting with '#' are ignored.
inline Config parse_config(std::istream& is, const std::string& origin = "<config>") {
  Config c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    if (key.size() > 2 && key.starts_with("--")) key = key.substr(2);
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    c.set(key, trim(t.substr(eq + 1)));
  }
  return c;
}

inline Config load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file: " + path.string());
  return parse_config(is, path.string());
}

/// Worker count: PTKR_THREADS if set, else the configured value, else the hardware concurrency.
inline int worker_count(int configured = 0) {
  if (const char* env = std::getenv("PTKR_THREADS"); env != nullptr && *env != '\0') {
    int n = 0;
    try {
      n = static_cast<int>(parse_integer(env));
    } catch (const Error&) {
      throw ConfigError(std::string("PTKR_THREADS must be a positive integer, got '") + env + "'");
    }
    if (n < 1) throw ConfigError("PTKR_THREADS must be >= 1");
    return n;
  }
  if (configured > 0) return configured;
  if (configured < 0) throw ConfigError("workers must be >= 1");
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Inclusive arithmetic grid lo, lo + step, ... <= hi (with a small tolerance at the top).
inline std::vector<double> arithmetic_grid(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ConfigError("grid step must be > 0");
  if (!(hi >= lo)) throw ConfigError("grid upper end below lower end");
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

}  // namespace ptkr::experiments
