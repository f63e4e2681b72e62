#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nafd::csv {

// Shortest round-trip decimal; non-finite values are rejected so every
// numeric cell stays a plain decimal.
std::string num(double v);
std::string num(long long v);

std::string row(const std::vector<std::string>& cells);

// Writes atomically enough for our purposes: truncate then write.
void write_file(const std::string& path, std::string_view content);

}  // namespace nafd::csv
