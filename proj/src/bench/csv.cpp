#include "tnp/bench/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace tnp::bench {

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join_coords(std::span<const double> x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ';';
    out += format_real(x[i]);
  }
  return out;
}

double parse_real(std::string_view field) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  if (field.empty()) throw std::invalid_argument("empty numeric field");
  double v = 0.0;
  const char* first = field.data();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::invalid_argument("malformed number '" + std::string(field) + "'");
  }
  return v;
}

std::vector<double> parse_coords(std::string_view field) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t sep = field.find(';', start);
    out.push_back(parse_real(field.substr(start, sep == std::string_view::npos ? sep : sep - start)));
    if (sep == std::string_view::npos) break;
    start = sep + 1;
  }
  return out;
}

}  // namespace tnp::bench
