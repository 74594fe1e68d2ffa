#pragma once

#include <cstdint>

#include "tnp/nn/real_array.hpp"

namespace tnp::smbo {

/// First n points of a d-dimensional Sobol sequence with a seeded digital
/// (XOR) shift; rows are points in [0,1)^d.
nn::RealArray make_candidates(std::size_t d, std::size_t n, std::uint64_t seed);

}  // namespace tnp::smbo
