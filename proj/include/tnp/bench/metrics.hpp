#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tnp::bench {

/// Ranks of `values` in descending order (1 = largest); tied values share
/// the mean of the ranks they span.
std::vector<double> tie_averaged_ranks(std::span<const double> values);

/// (y_max - best) / (y_max - y_min) clipped to [0,1]; 0 when y_max == y_min.
double adtm(double best_so_far, double y_min, double y_max);
std::vector<double> adtm(std::span<const double> best_so_far, double y_min, double y_max);

/// Best-so-far after 0..T model-guided trials of one run.
struct RunCurve {
  std::string method;
  std::string task_id;
  std::uint64_t seed = 0;
  std::vector<double> best_so_far;
  double observed_min = 0.0;
  double observed_max = 0.0;
  std::optional<double> known_optimum;
};

/// Per-trial mean rank of each method over every (task, seed). Needs at
/// least two methods and equal curve lengths; throws ContractError otherwise.
std::map<std::string, std::vector<double>> average_rank(std::span<const RunCurve> runs);

struct MetricRow {
  std::string method;
  std::string task_id;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  double best_so_far = 0.0;
  double rank = 0.0;
  double adtm = 0.0;
  double regret = 0.0;
};

/// Rank, distance to the maximum and simple regret for every curve point.
/// Per task, y_max is the larger of the known optimum and the pooled
/// observed maximum; y_min is the pooled observed minimum over all methods.
/// Rows are sorted by (task_id, seed, method, trial).
std::vector<MetricRow> compute_metrics(std::span<const RunCurve> runs);

void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows);
std::vector<MetricRow> read_metrics_csv(std::istream& in);

}  // namespace tnp::bench
