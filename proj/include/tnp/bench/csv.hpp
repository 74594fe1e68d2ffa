#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tnp::bench {

/// Splits on commas; fields in this project never contain commas or quotes.
std::vector<std::string> split_csv_line(std::string_view line);
/// Shortest round-trip decimal representation.
std::string format_real(double v);
/// Coordinates joined with ';'.
std::string join_coords(std::span<const double> x);
std::vector<double> parse_coords(std::string_view field);
/// Strict parse; throws std::invalid_argument on trailing garbage.
double parse_real(std::string_view field);

}  // namespace tnp::bench
