#pragma once

#include <string>

namespace mincomp {

// Shortest round-trip decimal form of v (std::to_chars); the one double
// formatter used for every CSV/SVG byte, so identical values always
// serialize identically.
std::string format_double(double v);

// Whole-file read/write with the path included in any error message.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mincomp
