#pragma once

#include <string>

namespace seg {

// Writes to <path>.tmp then renames, so a crash never leaves a partial file
// visible at the target path.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Full-precision double formatting, round-trippable via strtod.
std::string format_double(double v);

}  // namespace seg
