#pragma once

#include <map>
#include <string>
#include <vector>

namespace bems {

// Flat key-value configuration with dotted keys ("tess.mdot_fcu = 0.45").
// Lines starting with '#' are comments. Later assignments win, so a file can
// be layered with CLI overrides.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text, const std::string& origin = "<string>");

  void merge_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_real(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Throwing accessors for required keys.
  std::string require_string(const std::string& key) const;
  double require_real(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  void parse(const std::string& text, const std::string& origin);
  std::map<std::string, std::string> entries_;
};

}  // namespace bems
