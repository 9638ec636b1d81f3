#pragma once

#include <map>
#include <string>
#include <vector>

#include "pdlab/common.hpp"

namespace pdlab {

// Flat key-value configuration with TOML-like syntax: `key = value` lines,
// optional `[section]` headers that prefix subsequent keys ("sac.lr"), `#`
// comments, strings either bare or double-quoted. Values stay strings until
// a typed getter parses them (errors name the key).
class KvConfig {
 public:
  static KvConfig parse_string(const std::string& text);
  static KvConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  long long get_int(const std::string& key, long long def) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const;
  bool get_bool(const std::string& key, bool def) const;
  // Comma-separated lists.
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& def) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& def) const;
  std::vector<std::uint64_t> get_u64_list(
      const std::string& key, const std::vector<std::uint64_t>& def) const;

  // Fail-fast validation: every present key must appear in `known`,
  // otherwise ConfigError listing the valid keys.
  void require_known(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pdlab
