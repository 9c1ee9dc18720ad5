#pragma once

#include <string>

namespace roughns {

// All CSV output uses 17 significant digits and '\n' line endings.
std::string format_double(double v);

// Creates parent directories as needed; IoError on failure.
void write_file(const std::string& path, const std::string& contents);

}  // namespace roughns
