#include "tnp/tasks/history_gen.hpp"

#include <algorithm>

#include "tnp/errors.hpp"
#include "tnp/smbo/smbo.hpp"

namespace tnp::tasks {

np::HistorySet precompute_history(const BlackBoxTask& task, const std::string& base,
                                  std::size_t trials, std::uint64_t seed,
                                  const meta::MetaState* state, std::size_t n_candidates) {
  if (trials < 2) throw ConfigError("precompute_history: need at least two trials");
  if (base != "random" && base != "gp" && base != "cnp" && base != "tnp") {
    throw ConfigError("precompute_history: unsupported base method '" + base + "'");
  }
  smbo::MethodSpec method = smbo::method_by_name(base);
  // Historical runs have no history of their own to draw on.
  method.use_history = false;
  smbo::SmboConfig config;
  config.n_init = std::min<std::size_t>(3, trials);
  if (method.learned_init && state != nullptr) config.n_init = std::min(state->n_init(), trials);
  if (method.learned_init && state != nullptr && state->n_init() > trials) method.learned_init = false;
  config.trials = trials - config.n_init;
  config.n_candidates = n_candidates;
  config.seed = seed;
  const smbo::SmboResult run = smbo::run_smbo(task, method, config, state);
  return smbo::to_history(run, task.id(), task.dim());
}

}  // namespace tnp::tasks
