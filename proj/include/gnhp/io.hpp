#pragma once

#include <map>
#include <string>

namespace gnhp {

// Flat key=value configuration with typed getters. Accepts either a plain
// "key=value" file (one per line, '#' comments) or a single-level JSON
// object; values are stored as strings.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  static KeyValueConfig load(const std::string& path);
  static KeyValueConfig parse(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gnhp
