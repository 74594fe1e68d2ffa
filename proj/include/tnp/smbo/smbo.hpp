#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tnp/meta/meta_transfer.hpp"
#include "tnp/np/history.hpp"
#include "tnp/tasks/task.hpp"

namespace tnp::smbo {

enum class SurrogateKind { kRandom, kGp, kNeuralProcess };

/// A registered optimizer.
struct MethodSpec {
  std::string name;
  SurrogateKind surrogate = SurrogateKind::kRandom;
  bool use_history = false;   // attend to historical sets
  bool fine_tune = false;     // k steps from θ̃ before every proposal
  bool learned_init = false;  // evaluate MetaState::init_configs first
  bool meta_trained = false;  // θ̃ from meta-training rather than pre-training
};

/// random, gp, cnp (no transfer), tnp (full), plus ablations tnp_no_init
/// and tnp_no_history.
const std::vector<MethodSpec>& registered_methods();
const MethodSpec& method_by_name(const std::string& name);

struct SmboConfig {
  std::size_t trials = 20;        // T, model-guided trials after the initial ones
  std::size_t n_init = 3;         // n_I
  std::size_t n_candidates = 512; // n_X
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrialRecord {
  std::size_t trial = 0;  // 0-based over every evaluation, initial ones first
  std::vector<double> x;
  double y = 0.0;
  double best_so_far = 0.0;
  double millis = 0.0;
  bool initial = false;
};

struct SmboResult {
  std::vector<TrialRecord> records;
  std::vector<double> best_x;
  double best_y = 0.0;
};

/// Candidate set of a run: the task's own table when present, otherwise a
/// seeded Sobol set.
nn::RealArray run_candidates(const tasks::BlackBoxTask& task, const SmboConfig& config);

/// n_I initial configurations drawn without replacement from the candidate
/// set; identical for every method given the seed.
std::vector<std::size_t> initial_candidate_indices(std::size_t n_candidates, std::size_t n_init,
                                                   std::uint64_t seed);

/// Evaluates the initial configurations, then runs config.trials iterations
/// of fit → predict → argmax EI → evaluate. Neural-process methods need a
/// state; historical sets are used only when method.use_history is set.
SmboResult run_smbo(const tasks::BlackBoxTask& task, const MethodSpec& method,
                    const SmboConfig& config, const meta::MetaState* state = nullptr,
                    std::span<const np::HistorySet> historical = {});

/// Observations of a finished run as a history set.
np::HistorySet to_history(const SmboResult& result, const std::string& task_id, std::size_t dim);

}  // namespace tnp::smbo
