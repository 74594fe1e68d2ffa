#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tnp/np/history.hpp"
#include "tnp/np/np_params.hpp"
#include "tnp/rng.hpp"

namespace tnp::np {

/// Training on functions drawn from a squared-exponential GP prior.
struct PretrainConfig {
  std::size_t batches = 3000;
  std::size_t batch_size = 64;
  double learning_rate = 1e-5;
  double length_scale_min = 0.3;
  double length_scale_max = 1.0;
  double kernel_scale = 1.0;
  std::size_t min_points = 6;
  std::size_t max_points = 40;
  std::size_t dim = 1;
  bool standardize = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One function drawn at a random number of uniform points, as a history.
HistorySet sample_prior_history(const PretrainConfig& config, Rng& rng, std::size_t points = 0);

struct PretrainResult {
  NpParams params;
  std::vector<double> losses;  // one per batch, before the step
};

using PretrainProgress = std::function<void(std::size_t batch, double loss)>;

PretrainResult pretrain(NpParams params, const PretrainConfig& config,
                        const PretrainProgress& progress = {});

}  // namespace tnp::np
