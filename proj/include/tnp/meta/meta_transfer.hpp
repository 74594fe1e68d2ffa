#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "json.hpp"
#include "tnp/np/history.hpp"
#include "tnp/np/model.hpp"
#include "tnp/np/np_params.hpp"
#include "tnp/rng.hpp"

namespace tnp::meta {

using np::HistorySet;
using np::NpParams;
using nn::Index;
using nn::RealArray;

/// Transferable initialization and learned initial configurations.
struct MetaState {
  NpParams theta;
  RealArray init_configs;  // n_I × d, inside [0,1]^d
  double epsilon = 0.01;
  double alpha_inner = 1e-5;
  std::size_t k = 10;
  double softmax_temperature = 5.0;
  /// Step size of the ascent on the initial configurations.
  double init_lr = 1e-5;
  /// false follows the descent sign as literally written in Algorithm 1.
  bool ascend = true;

  std::size_t n_init() const { return static_cast<std::size_t>(init_configs.rows()); }
  void validate() const;
};

/// θ̃ plus n_I seeded uniform configurations.
MetaState make_meta_state(NpParams theta, std::size_t n_init, std::uint64_t seed);

/// k plain gradient steps on np_loss from theta, each on a fresh split of h.
/// `others` are attended to as across-dataset observations.
NpParams inner_adapt(const NpParams& theta, const HistorySet& h, std::span<const HistorySet> others,
                     std::size_t k, double alpha_inner, Rng& rng);

/// Meta-test fine-tuning; same mechanics as inner_adapt. Returns theta
/// unchanged when |h| < 2.
NpParams fine_tune(const NpParams& theta, const HistorySet& h, std::span<const HistorySet> others,
                   std::size_t k, double alpha_inner, Rng& rng);

/// θ̃ + ε(θ_k - θ̃), elementwise.
NpParams reptile_update(const NpParams& theta, const NpParams& adapted, double epsilon);
RealArray interpolate_configs(const RealArray& base, const RealArray& adapted, double epsilon);

/// Gradient of the objective with respect to the configuration rows.
using ConfigGradient = std::function<RealArray(const RealArray&)>;

/// k steps x <- clamp(x ± lr·∇) into [0,1]^d; + when ascend is true.
RealArray step_configs(RealArray configs, const ConfigGradient& gradient, std::size_t k, double lr,
                       bool ascend);

/// step_configs driven by init_config_loss, conditioned on all of h.
RealArray adapt_init_configs(const RealArray& configs, const NpParams& theta, const HistorySet& h,
                             std::span<const HistorySet> others, std::size_t k, double lr,
                             double softmax_temperature, bool ascend);

struct MetaTrainStats {
  std::vector<double> epoch_mean_loss;  // np_loss before adaptation, averaged per epoch
};

/// For every epoch, visits the tasks in a seeded order; for each task m the
/// remaining tasks act as historical sets. Histories are standardized per
/// task before use.
MetaState meta_train(MetaState state, std::span<const HistorySet> bundle, std::size_t epochs,
                     std::uint64_t seed, MetaTrainStats* stats = nullptr);

nlohmann::json to_json(const MetaState& s);
MetaState meta_state_from_json(const nlohmann::json& doc);
void save_meta_state(const MetaState& s, const std::string& path);
MetaState load_meta_state(const std::string& path);

}  // namespace tnp::meta
