#include "tnp/smbo/smbo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "tnp/errors.hpp"
#include "tnp/smbo/acquisition.hpp"
#include "tnp/smbo/candidates.hpp"
#include "tnp/smbo/gp_surrogate.hpp"

namespace tnp::smbo {

namespace {

// Stream identifiers for seed derivation.
constexpr std::uint64_t kCandidateStream = 0x63616e64;
constexpr std::uint64_t kInitStream = 0x696e6974;
constexpr std::uint64_t kRandomStream = 0x72616e64;
constexpr std::uint64_t kFineTuneStream = 0x66696e65;

std::vector<double> row_of(const nn::RealArray& m, nn::Index i) {
  std::vector<double> x(static_cast<std::size_t>(m.cols()));
  for (nn::Index j = 0; j < m.cols(); ++j) x[static_cast<std::size_t>(j)] = m(i, j);
  return x;
}

}  // namespace

const std::vector<MethodSpec>& registered_methods() {
  static const std::vector<MethodSpec> methods{
      {"random", SurrogateKind::kRandom, false, false, false, false},
      {"gp", SurrogateKind::kGp, false, false, false, false},
      {"cnp", SurrogateKind::kNeuralProcess, false, true, false, false},
      {"tnp", SurrogateKind::kNeuralProcess, true, true, true, true},
      {"tnp_no_init", SurrogateKind::kNeuralProcess, true, true, false, true},
      {"tnp_no_history", SurrogateKind::kNeuralProcess, false, true, true, true},
  };
  return methods;
}

const MethodSpec& method_by_name(const std::string& name) {
  for (const auto& m : registered_methods()) {
    if (m.name == name) return m;
  }
  throw ConfigError("unknown method '" + name + "'");
}

void SmboConfig::validate() const {
  if (n_init < 1) throw ConfigError("smbo: n_init must be at least 1");
  if (n_candidates < 1) throw ConfigError("smbo: n_candidates must be at least 1");
}

nn::RealArray run_candidates(const tasks::BlackBoxTask& task, const SmboConfig& config) {
  if (task.candidates()) return *task.candidates();
  return make_candidates(task.dim(), config.n_candidates, mix_seed(config.seed, kCandidateStream));
}

std::vector<std::size_t> initial_candidate_indices(std::size_t n_candidates, std::size_t n_init,
                                                   std::uint64_t seed) {
  std::vector<std::size_t> order(n_candidates);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(seed, kInitStream));
  const std::size_t take = std::min(n_init, n_candidates);
  // Partial Fisher-Yates: the first `take` slots are a uniform sample.
  for (std::size_t i = 0; i < take; ++i) {
    std::swap(order[i], order[i + rng.uniform_index(n_candidates - i)]);
  }
  order.resize(take);
  return order;
}

SmboResult run_smbo(const tasks::BlackBoxTask& task, const MethodSpec& method,
                    const SmboConfig& config, const meta::MetaState* state,
                    std::span<const np::HistorySet> historical) {
  config.validate();
  const bool neural = method.surrogate == SurrogateKind::kNeuralProcess;
  if ((neural || method.learned_init) && state == nullptr) {
    throw ConfigError("method " + method.name + " needs a meta state");
  }
  if (state != nullptr && neural &&
      static_cast<std::size_t>(state->theta.config.d) != task.dim()) {
    throw ConfigError("model dimension does not match task " + task.id());
  }

  const nn::RealArray candidates = run_candidates(task, config);
  const std::size_t n_cand = static_cast<std::size_t>(candidates.rows());
  std::vector<bool> available(n_cand, true);

  std::vector<np::HistorySet> hist_std;
  if (neural && method.use_history) hist_std = np::standardized(historical);

  np::HistorySet history(task.id(), task.dim());
  SmboResult result;
  result.best_y = -std::numeric_limits<double>::infinity();
  double observed_min = std::numeric_limits<double>::infinity();

  auto clock_ms = [] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  };
  auto evaluate = [&](std::vector<double> x, bool initial, double started) {
    double y = std::numeric_limits<double>::quiet_NaN();
    try {
      y = task.evaluate(x);
    } catch (const std::exception& e) {
      spdlog::warn("task {} failed at trial {}: {}", task.id(), result.records.size(), e.what());
    }
    if (!std::isfinite(y)) {
      const double guard = std::isfinite(observed_min) ? observed_min : 0.0;
      spdlog::warn("task {}: non-finite score at trial {}, recording {}", task.id(),
                   result.records.size(), guard);
      y = guard;
    }
    observed_min = std::min(observed_min, y);
    history.add({x, y});
    if (y > result.best_y) {
      result.best_y = y;
      result.best_x = x;
    }
    result.records.push_back(
        {result.records.size(), std::move(x), y, result.best_y, clock_ms() - started, initial});
  };

  // Initial design.
  if (method.learned_init) {
    for (nn::Index i = 0; i < state->init_configs.rows(); ++i) {
      const double t0 = clock_ms();
      evaluate(row_of(state->init_configs, i), true, t0);
    }
  } else {
    for (const std::size_t idx : initial_candidate_indices(n_cand, config.n_init, config.seed)) {
      const double t0 = clock_ms();
      available[idx] = false;
      evaluate(row_of(candidates, static_cast<nn::Index>(idx)), true, t0);
    }
  }

  Rng random_rng(mix_seed(config.seed, kRandomStream));
  for (std::size_t t = 0; t < config.trials; ++t) {
    const double t0 = clock_ms();
    if (std::none_of(available.begin(), available.end(), [](bool a) { return a; })) {
      std::fill(available.begin(), available.end(), true);
    }
    std::size_t choice = 0;
    if (method.surrogate == SurrogateKind::kRandom) {
      std::vector<std::size_t> open;
      for (std::size_t i = 0; i < n_cand; ++i) {
        if (available[i]) open.push_back(i);
      }
      choice = open[random_rng.uniform_index(open.size())];
    } else {
      const np::Standardizer z = np::fit_standardizer(history);
      const np::HistorySet target = np::standardized(history);
      const double y_best = z.apply(result.best_y);
      std::vector<np::GaussianPrediction> preds;
      if (method.surrogate == SurrogateKind::kGp) {
        preds = gp_surrogate_predict(target, candidates);
      } else {
        np::NpParams theta = state->theta;
        if (method.fine_tune) {
          Rng ft_rng(mix_seed(mix_seed(config.seed, kFineTuneStream), t));
          theta = meta::fine_tune(state->theta, target, hist_std, state->k, state->alpha_inner, ft_rng);
        }
        preds = np::predict(theta, candidates, target, hist_std);
      }
      choice = propose_next(preds, y_best, available);
    }
    available[choice] = false;
    evaluate(row_of(candidates, static_cast<nn::Index>(choice)), false, t0);
  }
  return result;
}

np::HistorySet to_history(const SmboResult& result, const std::string& task_id, std::size_t dim) {
  np::HistorySet h(task_id, dim);
  for (const auto& r : result.records) h.add({r.x, r.y});
  return h;
}

}  // namespace tnp::smbo
