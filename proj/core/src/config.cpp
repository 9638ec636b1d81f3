#include "pdlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pdlab {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quotes = !in_quotes;
    if (line[i] == '#' && !in_quotes) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty() || !items.empty()) items.push_back(last);
  return items;
}

double parse_double_or_throw(const std::string& key, const std::string& s) {
  const char* b = s.data();
  double v = 0.0;
  const auto res = std::from_chars(b, b + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != b + s.size())
    throw ConfigError("config key '" + key + "': bad number '" + s + "'");
  return v;
}

long long parse_int_or_throw(const std::string& key, const std::string& s) {
  const char* b = s.data();
  long long v = 0;
  const auto res = std::from_chars(b, b + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != b + s.size())
    throw ConfigError("config key '" + key + "': bad integer '" + s + "'");
  return v;
}

std::uint64_t parse_u64_or_throw(const std::string& key,
                                 const std::string& s) {
  const char* b = s.data();
  std::uint64_t v = 0;
  const auto res = std::from_chars(b, b + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != b + s.size())
    throw ConfigError("config key '" + key + "': bad unsigned integer '" + s +
                      "'");
  return v;
}

}  // namespace

KvConfig KvConfig::parse_string(const std::string& text) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty section name");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    if (!section.empty()) key = section + "." + key;
    cfg.values_[key] = value;
  }
  return cfg;
}

KvConfig KvConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

bool KvConfig::has(const std::string& key) const {
  return values_.count(key) > 0;
}

void KvConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::string KvConfig::get_string(const std::string& key,
                                 const std::string& def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

double KvConfig::get_double(const std::string& key, double def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? def : parse_double_or_throw(key, it->second);
}

long long KvConfig::get_int(const std::string& key, long long def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? def : parse_int_or_throw(key, it->second);
}

std::uint64_t KvConfig::get_u64(const std::string& key,
                                std::uint64_t def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? def : parse_u64_or_throw(key, it->second);
}

bool KvConfig::get_bool(const std::string& key, bool def) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return def;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config key '" + key + "': bad boolean '" + it->second +
                    "' (use true/false)");
}

std::vector<int> KvConfig::get_int_list(const std::string& key,
                                        const std::vector<int>& def) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::vector<int> out;
  for (const std::string& s : split_list(it->second))
    out.push_back(static_cast<int>(parse_int_or_throw(key, s)));
  return out;
}

std::vector<double> KvConfig::get_double_list(
    const std::string& key, const std::vector<double>& def) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::vector<double> out;
  for (const std::string& s : split_list(it->second))
    out.push_back(parse_double_or_throw(key, s));
  return out;
}

std::vector<std::uint64_t> KvConfig::get_u64_list(
    const std::string& key, const std::vector<std::uint64_t>& def) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return def;
  std::vector<std::uint64_t> out;
  for (const std::string& s : split_list(it->second))
    out.push_back(parse_u64_or_throw(key, s));
  return out;
}

void KvConfig::require_known(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) != known.end()) continue;
    std::string msg = "unknown config key '" + key + "'; valid keys:";
    std::vector<std::string> sorted = known;
    std::sort(sorted.begin(), sorted.end());
    for (const std::string& k : sorted) msg += "\n  " + k;
    throw ConfigError(msg);
  }
}

}  // namespace pdlab
