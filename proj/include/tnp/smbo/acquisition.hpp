#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tnp/np/model.hpp"

namespace tnp::smbo {

/// Expected improvement over y_best for maximization.
double expected_improvement(double mean, double stddev, double y_best);

/// Index of the largest EI; lowest index wins ties. When `available` is
/// non-empty, only entries marked true are eligible (falls back to every
/// entry if none is).
std::size_t propose_next(std::span<const np::GaussianPrediction> predictions, double y_best,
                         const std::vector<bool>& available = {});

}  // namespace tnp::smbo
