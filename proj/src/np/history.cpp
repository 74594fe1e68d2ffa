#include "tnp/np/history.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "tnp/bench/csv.hpp"
#include "tnp/errors.hpp"

namespace tnp::np {

HistorySet::HistorySet(std::string task_id, std::size_t dim)
    : task_id_(std::move(task_id)), dim_(dim) {}

void HistorySet::add(Observation obs) {
  if (dim_ == 0) dim_ = obs.x.size();
  if (obs.x.size() != dim_) {
    throw ConfigError("history " + task_id_ + ": observation has dimension " +
                      std::to_string(obs.x.size()) + ", expected " + std::to_string(dim_));
  }
  for (double v : obs.x) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ContractError("history " + task_id_ + ": configuration coordinate outside [0,1]");
    }
  }
  if (!std::isfinite(obs.y)) throw NumericError("history " + task_id_ + ": non-finite score");
  if (observations_.empty() || obs.y > observations_[best_index_].y) {
    best_index_ = observations_.size();
  }
  observations_.push_back(std::move(obs));
}

const Observation& HistorySet::best() const {
  if (observations_.empty()) throw ContractError("history " + task_id_ + ": no observations");
  return observations_[best_index_];
}

nn::RealArray HistorySet::x_matrix() const {
  nn::RealArray x(static_cast<nn::Index>(size()), static_cast<nn::Index>(dim_));
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      x(static_cast<nn::Index>(i), static_cast<nn::Index>(j)) = observations_[i].x[j];
    }
  }
  return x;
}

nn::RealArray HistorySet::y_column() const {
  nn::RealArray y(static_cast<nn::Index>(size()), 1);
  for (std::size_t i = 0; i < size(); ++i) y(static_cast<nn::Index>(i), 0) = observations_[i].y;
  return y;
}

Standardizer fit_standardizer(const HistorySet& h) {
  Standardizer s;
  if (h.empty()) return s;
  double total = 0.0;
  for (const auto& o : h.observations()) total += o.y;
  s.mean = total / static_cast<double>(h.size());
  double sq = 0.0;
  for (const auto& o : h.observations()) sq += (o.y - s.mean) * (o.y - s.mean);
  const double sd = std::sqrt(sq / static_cast<double>(h.size()));
  s.scale = sd < 1e-12 ? 1.0 : sd;
  return s;
}

HistorySet standardized(const HistorySet& h) {
  const Standardizer s = fit_standardizer(h);
  HistorySet out(h.task_id(), h.dim());
  for (const auto& o : h.observations()) out.add({o.x, s.apply(o.y)});
  return out;
}

std::vector<HistorySet> standardized(std::span<const HistorySet> sets) {
  std::vector<HistorySet> out;
  out.reserve(sets.size());
  for (const auto& h : sets) out.push_back(standardized(h));
  return out;
}

void write_history_csv(std::ostream& out, std::span<const HistorySet> sets, bool header) {
  if (header) out << "task_id,t,x,y\n";
  for (const auto& h : sets) {
    for (std::size_t t = 0; t < h.size(); ++t) {
      out << h.task_id() << ',' << t << ',' << bench::join_coords(h[t].x) << ','
          << bench::format_real(h[t].y) << '\n';
    }
  }
}

std::vector<HistorySet> read_history_csv(std::istream& in) {
  std::vector<HistorySet> sets;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = bench::split_csv_line(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "task_id") continue;
    if (fields.size() != 4) throw IngestError("history csv: expected 4 fields", line_no);
    Observation obs;
    try {
      obs.x = bench::parse_coords(fields[2]);
      obs.y = bench::parse_real(fields[3]);
    } catch (const std::exception& e) {
      throw IngestError(std::string("history csv: ") + e.what(), line_no);
    }
    auto [it, inserted] = index.emplace(fields[0], sets.size());
    if (inserted) sets.emplace_back(fields[0], obs.x.size());
    try {
      sets[it->second].add(std::move(obs));
    } catch (const std::exception& e) {
      throw IngestError(std::string("history csv: ") + e.what(), line_no);
    }
  }
  return sets;
}

}  // namespace tnp::np
