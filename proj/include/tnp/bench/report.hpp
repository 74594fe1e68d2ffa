#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tnp/bench/metrics.hpp"

namespace tnp::bench {

struct SummaryRow {
  std::string method;
  std::size_t trial = 0;
  double mean_rank = 0.0;
  double mean_adtm = 0.0;
  double median_regret = 0.0;
  double q25 = 0.0;  // regret quartiles
  double q75 = 0.0;
};

/// Linear-interpolation quantile (type 7) of unsorted values.
double quantile(std::vector<double> values, double p);

/// Aggregates metric rows per (method, trial), sorted by method then trial.
std::vector<SummaryRow> report(std::span<const MetricRow> rows);
/// Reads metrics CSV; malformed rows raise IngestError with the line number.
std::vector<SummaryRow> report(std::istream& metrics_csv);

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace tnp::bench
