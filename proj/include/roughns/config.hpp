#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace roughns {

// Minimal `key = value` configuration with [section] headers. UTF-8, '#'
// comments, blank lines ignored. Keys are addressed as "section.key".
// Grammar is documented in the README.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);  // IoError on failure

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Space-separated doubles.
  std::vector<double> get_vector(const std::string& key) const;
  // ';'-separated list of space-separated doubles.
  std::vector<std::vector<double>> get_vector_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

 private:
  const std::string& raw(const std::string& key) const;  // ConfigError if missing
  std::map<std::string, std::string> entries_;
};

}  // namespace roughns
