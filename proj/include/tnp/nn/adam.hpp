#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tnp/nn/real_array.hpp"

namespace tnp::nn {

struct AdamConfig {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates congruent with a parameter list.
struct AdamState {
  AdamConfig config;
  std::vector<RealArray> first_moment;
  std::vector<RealArray> second_moment;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(AdamConfig cfg, std::span<const RealArray* const> params);
};

/// One bias-corrected Adam update. Throws NumericError on a non-finite
/// gradient (parameters and state are left untouched) and ConfigError when
/// shapes are not congruent.
void adam_step(std::span<RealArray* const> params, std::span<const RealArray* const> grads,
               AdamState& state);

}  // namespace tnp::nn
