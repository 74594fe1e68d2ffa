#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tnp/nn/real_array.hpp"

namespace tnp::np {

/// A configuration in [0,1]^d and its score.
struct Observation {
  std::vector<double> x;
  double y = 0.0;
};

/// Ordered observations of one task plus the running best.
class HistorySet {
 public:
  HistorySet() = default;
  HistorySet(std::string task_id, std::size_t dim);

  /// Validates coordinates in [0,1], finite y and matching dimension.
  void add(Observation obs);

  const std::string& task_id() const noexcept { return task_id_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return observations_.size(); }
  bool empty() const noexcept { return observations_.empty(); }
  const std::vector<Observation>& observations() const noexcept { return observations_; }
  const Observation& operator[](std::size_t i) const { return observations_.at(i); }

  /// First observation attaining the maximum y. Throws ContractError if empty.
  const Observation& best() const;

  nn::RealArray x_matrix() const;  // n × d
  nn::RealArray y_column() const;  // n × 1

 private:
  std::string task_id_;
  std::size_t dim_ = 0;
  std::vector<Observation> observations_;
  std::size_t best_index_ = 0;
};

/// Affine map y -> (y - mean) / scale fitted on a history.
struct Standardizer {
  double mean = 0.0;
  double scale = 1.0;

  double apply(double y) const { return (y - mean) / scale; }
  double invert(double z) const { return z * scale + mean; }
};

/// Mean and population standard deviation; scale falls back to 1 when the
/// spread is below 1e-12 (e.g. a single observation).
Standardizer fit_standardizer(const HistorySet& h);
HistorySet standardized(const HistorySet& h);
std::vector<HistorySet> standardized(std::span<const HistorySet> sets);

/// Rows "task_id,t,x1;x2;...,y".
void write_history_csv(std::ostream& out, std::span<const HistorySet> sets, bool header = true);
std::vector<HistorySet> read_history_csv(std::istream& in);

}  // namespace tnp::np
