#include "roughns/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "roughns/errors.hpp"

namespace roughns {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no), "unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "empty key");
    cfg.entries_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

const std::string& Config::raw(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key, "missing required key");
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = raw(key);
  char* end = nullptr;
  const double parsed = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') throw ConfigError(key, "not a number: " + v);
  return parsed;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  const std::string& v = raw(key);
  char* end = nullptr;
  const long parsed = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') throw ConfigError(key, "not an integer: " + v);
  return parsed;
}

long Config::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = raw(key);
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') throw ConfigError(key, "not an unsigned integer: " + v);
  return parsed;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = raw(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "not a boolean: " + v);
}

std::vector<double> Config::get_vector(const std::string& key) const {
  std::istringstream in(raw(key));
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    char* end = nullptr;
    const double parsed = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') throw ConfigError(key, "not a number: " + token);
    out.push_back(parsed);
  }
  if (out.empty()) throw ConfigError(key, "empty vector");
  return out;
}

std::vector<std::vector<double>> Config::get_vector_list(const std::string& key) const {
  const std::string& v = raw(key);
  std::vector<std::vector<double>> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto semi = v.find(';', start);
    const std::string chunk =
        semi == std::string::npos ? v.substr(start) : v.substr(start, semi - start);
    std::istringstream in(chunk);
    std::vector<double> row;
    std::string token;
    while (in >> token) {
      char* end = nullptr;
      const double parsed = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') throw ConfigError(key, "not a number: " + token);
      row.push_back(parsed);
    }
    if (!row.empty()) out.push_back(std::move(row));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

}  // namespace roughns
