#include "tnp/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "tnp/bench/csv.hpp"
#include "tnp/errors.hpp"

namespace tnp::bench {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ContractError("quantile: no values");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SummaryRow> report(std::span<const MetricRow> rows) {
  struct Acc {
    double rank = 0.0;
    double adtm = 0.0;
    std::vector<double> regrets;
  };
  std::map<std::pair<std::string, std::size_t>, Acc> groups;
  for (const auto& r : rows) {
    Acc& a = groups[{r.method, r.trial}];
    a.rank += r.rank;
    a.adtm += r.adtm;
    a.regrets.push_back(r.regret);
  }
  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (auto& [key, a] : groups) {
    const double n = static_cast<double>(a.regrets.size());
    out.push_back({key.first, key.second, a.rank / n, a.adtm / n, quantile(a.regrets, 0.5),
                   quantile(a.regrets, 0.25), quantile(a.regrets, 0.75)});
  }
  return out;
}

std::vector<SummaryRow> report(std::istream& metrics_csv) {
  const auto rows = read_metrics_csv(metrics_csv);
  return report(rows);
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "method,trial,mean_rank,mean_adtm,median_regret,q25,q75\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.trial << ',' << format_real(r.mean_rank) << ','
        << format_real(r.mean_adtm) << ',' << format_real(r.median_regret) << ','
        << format_real(r.q25) << ',' << format_real(r.q75) << '\n';
  }
}

}  // namespace tnp::bench
