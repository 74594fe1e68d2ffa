#include "tnp/smbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tnp/errors.hpp"

namespace tnp::smbo {

double expected_improvement(double mean, double stddev, double y_best) {
  const double gap = mean - y_best;
  if (!(stddev > 0.0)) return std::max(gap, 0.0);
  const double z = gap / stddev;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(gap * cdf + stddev * pdf, 0.0);
}

std::size_t propose_next(std::span<const np::GaussianPrediction> predictions, double y_best,
                         const std::vector<bool>& available) {
  if (predictions.empty()) throw ContractError("propose_next: no candidates");
  if (!available.empty() && available.size() != predictions.size()) {
    throw ContractError("propose_next: availability mask has the wrong length");
  }
  const bool masked = !available.empty() && std::find(available.begin(), available.end(), true) != available.end();
  std::size_t best = predictions.size();
  double best_ei = -1.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (masked && !available[i]) continue;
    double ei = expected_improvement(predictions[i].mean, predictions[i].stddev, y_best);
    if (std::isnan(ei)) ei = 0.0;
    if (ei > best_ei) {
      best_ei = ei;
      best = i;
    }
  }
  return best;
}

}  // namespace tnp::smbo
