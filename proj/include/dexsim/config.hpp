#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dexsim/result.hpp"
#include "dexsim/util.hpp"

namespace dexsim {

// Flat key = value configuration file. Lines starting with '#' and blank
// lines are ignored. Values keep internal whitespace; lists are
// comma-separated.
class Config {
 public:
  static Expected<Config> load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return Error{"cannot open config file: " + path};
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
  }

  static Expected<Config> from_string(const std::string& text) {
    Config cfg;
    int lineno = 0;
    for (const auto& raw : split(text, '\n')) {
      ++lineno;
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        return Error{"config line " + std::to_string(lineno) + ": expected key = value"};
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty()) return Error{"config line " + std::to_string(lineno) + ": empty key"};
      cfg.values_[key] = value;
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  Expected<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return Error{"missing config key: " + key};
    return it->second;
  }

  Expected<long long> get_int(const std::string& key) const {
    auto v = get(key);
    if (!v) return v.error();
    try {
      std::size_t used = 0;
      long long n = std::stoll(v.value(), &used);
      if (used != v.value().size()) return Error{"config key " + key + ": not an integer"};
      return n;
    } catch (const std::exception&) {
      return Error{"config key " + key + ": not an integer"};
    }
  }

  long long get_int_or(const std::string& key, long long fallback) const {
    auto v = get_int(key);
    return v ? v.value() : fallback;
  }

  Expected<double> get_double(const std::string& key) const {
    auto v = get(key);
    if (!v) return v.error();
    try {
      std::size_t used = 0;
      double d = std::stod(v.value(), &used);
      if (used != v.value().size()) return Error{"config key " + key + ": not a number"};
      return d;
    } catch (const std::exception&) {
      return Error{"config key " + key + ": not a number"};
    }
  }

  double get_double_or(const std::string& key, double fallback) const {
    auto v = get_double(key);
    return v ? v.value() : fallback;
  }

  std::vector<std::string> get_list_or(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end() || trim(it->second).empty()) return {};
    std::vector<std::string> out;
    for (auto& item : split(it->second, ',')) {
      std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace dexsim
