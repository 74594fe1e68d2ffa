#include "tnp/bench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <tuple>

#include "tnp/bench/csv.hpp"
#include "tnp/errors.hpp"

namespace tnp::bench {

std::vector<double> tie_averaged_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double shared = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
    i = j;
  }
  return ranks;
}

double adtm(double best_so_far, double y_min, double y_max) {
  if (!(y_max > y_min)) return 0.0;
  return std::clamp((y_max - best_so_far) / (y_max - y_min), 0.0, 1.0);
}

std::vector<double> adtm(std::span<const double> best_so_far, double y_min, double y_max) {
  std::vector<double> out;
  out.reserve(best_so_far.size());
  for (double b : best_so_far) out.push_back(adtm(b, y_min, y_max));
  return out;
}

namespace {

using GroupKey = std::pair<std::string, std::uint64_t>;

// Runs grouped by (task, seed), each group sorted by method name.
std::map<GroupKey, std::vector<const RunCurve*>> group_runs(std::span<const RunCurve> runs) {
  std::map<GroupKey, std::vector<const RunCurve*>> groups;
  for (const auto& r : runs) groups[{r.task_id, r.seed}].push_back(&r);
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const RunCurve* a, const RunCurve* b) { return a->method < b->method; });
    const std::size_t len = members.front()->best_so_far.size();
    for (const RunCurve* m : members) {
      if (m->best_so_far.size() != len) {
        throw ContractError("curves for task " + key.first + " seed " + std::to_string(key.second) +
                            " have different trial counts");
      }
    }
  }
  return groups;
}

std::vector<std::vector<double>> group_ranks(const std::vector<const RunCurve*>& members) {
  const std::size_t len = members.front()->best_so_far.size();
  std::vector<std::vector<double>> ranks(members.size(), std::vector<double>(len));
  std::vector<double> column(members.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t m = 0; m < members.size(); ++m) column[m] = members[m]->best_so_far[t];
    const auto r = tie_averaged_ranks(column);
    for (std::size_t m = 0; m < members.size(); ++m) ranks[m][t] = r[m];
  }
  return ranks;
}

}  // namespace

std::map<std::string, std::vector<double>> average_rank(std::span<const RunCurve> runs) {
  if (runs.empty()) throw ContractError("average_rank: no runs");
  const auto groups = group_runs(runs);
  std::map<std::string, std::vector<double>> sums;
  std::map<std::string, std::size_t> counts;
  std::size_t len = groups.begin()->second.front()->best_so_far.size();
  for (const auto& [key, members] : groups) {
    if (members.size() < 2) throw ContractError("average_rank: need at least two methods per task and seed");
    if (members.front()->best_so_far.size() != len) {
      throw ContractError("average_rank: trial axes are not aligned");
    }
    const auto ranks = group_ranks(members);
    for (std::size_t m = 0; m < members.size(); ++m) {
      auto& s = sums[members[m]->method];
      s.resize(len, 0.0);
      for (std::size_t t = 0; t < len; ++t) s[t] += ranks[m][t];
      ++counts[members[m]->method];
    }
  }
  for (auto& [method, s] : sums) {
    for (double& v : s) v /= static_cast<double>(counts[method]);
  }
  return sums;
}

std::vector<MetricRow> compute_metrics(std::span<const RunCurve> runs) {
  std::map<std::string, std::pair<double, double>> task_range;  // (y_min, y_max)
  for (const auto& r : runs) {
    double hi = r.observed_max;
    if (r.known_optimum) hi = std::max(hi, *r.known_optimum);
    auto [it, inserted] = task_range.try_emplace(r.task_id, r.observed_min, hi);
    if (!inserted) {
      it->second.first = std::min(it->second.first, r.observed_min);
      it->second.second = std::max(it->second.second, hi);
    }
  }
  std::vector<MetricRow> rows;
  for (const auto& [key, members] : group_runs(runs)) {
    const auto ranks = group_ranks(members);
    const auto [y_min, y_max] = task_range.at(key.first);
    for (std::size_t m = 0; m < members.size(); ++m) {
      const RunCurve& r = *members[m];
      for (std::size_t t = 0; t < r.best_so_far.size(); ++t) {
        const double best = r.best_so_far[t];
        rows.push_back({r.method, r.task_id, r.seed, t, best, ranks[m][t], adtm(best, y_min, y_max),
                        std::max(y_max - best, 0.0)});
      }
    }
  }
  return rows;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows) {
  out << "method,task_id,seed,trial,best_so_far,rank,adtm,regret\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.task_id << ',' << r.seed << ',' << r.trial << ','
        << format_real(r.best_so_far) << ',' << format_real(r.rank) << ',' << format_real(r.adtm)
        << ',' << format_real(r.regret) << '\n';
  }
}

std::vector<MetricRow> read_metrics_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw IngestError("metrics: missing header", line_no);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "method,task_id,seed,trial,best_so_far,rank,adtm,regret") {
    throw IngestError("metrics: unexpected header", line_no);
  }
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw IngestError("metrics: expected 8 fields", line_no);
    try {
      MetricRow r;
      r.method = f[0];
      r.task_id = f[1];
      std::size_t pos = 0;
      r.seed = std::stoull(f[2], &pos);
      if (pos != f[2].size()) throw std::invalid_argument("seed");
      r.trial = std::stoull(f[3], &pos);
      if (pos != f[3].size()) throw std::invalid_argument("trial");
      r.best_so_far = parse_real(f[4]);
      r.rank = parse_real(f[5]);
      r.adtm = parse_real(f[6]);
      r.regret = parse_real(f[7]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw IngestError("metrics: malformed field", line_no);
    }
  }
  return rows;
}

}  // namespace tnp::bench
