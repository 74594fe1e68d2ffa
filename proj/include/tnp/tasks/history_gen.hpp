#pragma once

#include <cstdint>
#include <string>

#include "tnp/meta/meta_transfer.hpp"
#include "tnp/np/history.hpp"
#include "tnp/tasks/task.hpp"

namespace tnp::tasks {

/// Runs `base` (random, gp, cnp or tnp) for `trials` evaluations in total
/// and returns its observations. Neural bases need a state.
np::HistorySet precompute_history(const BlackBoxTask& task, const std::string& base,
                                  std::size_t trials, std::uint64_t seed,
                                  const meta::MetaState* state = nullptr,
                                  std::size_t n_candidates = 512);

}  // namespace tnp::tasks
