#pragma once

// config.hpp - flat key=value scenario configuration.
//
// Grammar (one statement per line):
//   key = value
// Keys match [A-Za-z0-9_.]+ with dotted namespaces (ofdm.m_fft, link.eirp_dbm).
// '#' starts a comment (whole line or trailing); blank lines are ignored.
// Values keep inner whitespace; surrounding whitespace is trimmed.
// Unknown keys are errors, not silently ignored.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace isar {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class KeyValueConfig {
 public:
  static KeyValueConfig parse_string(const std::string& text, const std::string& source = "<string>") {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (!valid_key(key))
        throw ConfigError(source + ":" + std::to_string(line_no) + ": bad key '" + key + "'");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Fill a default only if the key is absent (used to materialize the
  /// resolved configuration for the run manifest).
  void set_default(const std::string& key, const std::string& value) {
    values_.emplace(key, value);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  /// Apply "key=value" override strings (CLI --set).
  void apply_overrides(const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw ConfigError("override must be key=value: " + o);
      const std::string key = trim(o.substr(0, eq));
      if (!valid_key(key)) throw ConfigError("override has bad key: " + o);
      values_[key] = trim(o.substr(eq + 1));
    }
  }

  const std::string& get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required config key: " + key);
    return it->second;
  }

  double get_double(const std::string& key) const {
    const std::string& v = get_string(key);
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " is not a number: '" + v + "'");
    }
  }

  std::uint64_t get_u64(const std::string& key) const {
    const std::string& v = get_string(key);
    try {
      std::size_t used = 0;
      const unsigned long long x = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + " is not an unsigned integer: '" + v + "'");
    }
  }

  bool get_bool(const std::string& key) const {
    std::string v = get_string(key);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError("config key " + key + " is not a boolean: '" + v + "'");
  }

  /// Comma-separated list of tokens.
  std::vector<std::string> get_list(const std::string& key) const {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(get_string(key));
    while (std::getline(in, item, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  /// Reject keys outside the declared schema; lists every offender.
  void check_known(const std::vector<std::string>& exact_keys,
                   const std::vector<std::string>& prefixes = {}) const {
    std::vector<std::string> unknown;
    for (const auto& [key, value] : values_) {
      if (std::find(exact_keys.begin(), exact_keys.end(), key) != exact_keys.end()) continue;
      bool matched = false;
      for (const auto& p : prefixes)
        if (key.rfind(p, 0) == 0) {
          matched = true;
          break;
        }
      if (!matched) unknown.push_back(key);
    }
    if (!unknown.empty()) {
      std::string msg = "unknown config key(s):";
      for (const auto& k : unknown) msg += " " + k;
      throw ConfigError(msg);
    }
  }

  /// Keys sharing a prefix, sorted (for indexed groups like target.0.*).
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [key, value] : values_)
      if (key.rfind(prefix, 0) == 0) out.push_back(key);
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

  /// Sorted "key = value" text; reparsing reproduces the same configuration.
  std::string serialize() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << " = " << value << "\n";
    return out.str();
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static bool valid_key(const std::string& key) {
    if (key.empty()) return false;
    return std::all_of(key.begin(), key.end(), [](unsigned char c) {
      return std::isalnum(c) || c == '_' || c == '.';
    });
  }

  std::map<std::string, std::string> values_;
};

}  // namespace isar
