#include "roughns/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "roughns/errors.hpp"

namespace roughns {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& contents) {
  std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + p.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << contents;
  if (!out) throw IoError("short write to " + path);
}

}  // namespace roughns
