#pragma once

#include <string>

namespace cspipe::io {

// Whole-file read/write; both throw DataError when the file cannot be opened.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& contents);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace cspipe::io
