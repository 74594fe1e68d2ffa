#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string>

#include "tnp/bench/csv.hpp"
#include "tnp/errors.hpp"
#include "tnp/tasks/families.hpp"

namespace tnp::tasks {

BlackBoxTask load_tabular_task(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open tabular task " + path, 0);
  std::string id = path;
  if (const auto slash = id.find_last_of('/'); slash != std::string::npos) id = id.substr(slash + 1);
  if (const auto dot = id.rfind('.'); dot != std::string::npos && dot > 0) id.resize(dot);
  return load_tabular_task(in, id);
}

BlackBoxTask load_tabular_task(std::istream& in, std::string id) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw IngestError("tabular task: missing header", line_no);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = bench::split_csv_line(line);
  if (header.size() < 2 || header.back() != "y") {
    throw IngestError("tabular task: header must be x1..xd,y", line_no);
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (header[i] != "x" + std::to_string(i + 1)) {
      throw IngestError("tabular task: header must be x1..xd,y", line_no);
    }
  }

  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = bench::split_csv_line(line);
    if (fields.size() != dim + 1) throw IngestError("tabular task: wrong field count", line_no);
    std::vector<double> x(dim);
    double y = 0.0;
    try {
      for (std::size_t i = 0; i < dim; ++i) x[i] = bench::parse_real(fields[i]);
      y = bench::parse_real(fields[dim]);
    } catch (const std::invalid_argument&) {
      throw IngestError("tabular task: malformed number", line_no);
    }
    for (double v : x) {
      if (!(v >= 0.0 && v <= 1.0)) throw IngestError("tabular task: x outside [0,1]", line_no);
    }
    if (!std::isfinite(y)) throw IngestError("tabular task: non-finite y", line_no);
    xs.push_back(std::move(x));
    ys.push_back(y);
  }
  if (xs.empty()) throw IngestError("tabular task: no rows", line_no);

  nn::RealArray cand(static_cast<nn::Index>(xs.size()), static_cast<nn::Index>(dim));
  std::size_t best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      cand(static_cast<nn::Index>(i), static_cast<nn::Index>(j)) = xs[i][j];
    }
    if (ys[i] > ys[best]) best = i;
  }
  KnownOptimum opt{ys[best], xs[best]};
  BlackBoxTask task(std::move(id), dim, [xs, ys](std::span<const double> q) {
    std::size_t nearest = 0;
    double nearest_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double sq = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) sq += (xs[i][j] - q[j]) * (xs[i][j] - q[j]);
      if (sq < nearest_sq) {
        nearest_sq = sq;
        nearest = i;
      }
    }
    return ys[nearest];
  });
  task.set_optimum(std::move(opt));
  task.set_candidates(std::move(cand));
  return task;
}

}  // namespace tnp::tasks
