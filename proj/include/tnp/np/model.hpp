#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "tnp/nn/adam.hpp"
#include "tnp/nn/tape.hpp"
#include "tnp/np/history.hpp"
#include "tnp/np/np_params.hpp"
#include "tnp/rng.hpp"

namespace tnp::np {

struct GaussianPrediction {
  double mean = 0.0;
  double stddev = 1.0;
};

/// Softmax over [1, s^1·1_{T^1}, ..., s^M·1_{T^M}].
///
/// weights[0] is the single in-dataset slot, broadcast over every in-dataset
/// observation; the following T^m entries belong to historical task m.
struct SimilarityVector {
  std::vector<double> weights;
  std::vector<double> cosines;          // s^m, one per historical task
  std::vector<std::size_t> task_sizes;  // T^m

  double in_dataset_weight() const { return weights.front(); }
  /// Summed weight over the T^m slots of task m (0-based).
  double task_mass(std::size_t m) const;
};

/// Keys and value embeddings of one observation set.
struct KeySet {
  RealArray x;  // n × d
  RealArray r;  // n × r
};

struct AttentionOutput {
  RealArray representation;             // queries × r, heads concatenated
  std::vector<RealArray> head_weights;  // per head: queries × keys, post-softmax
};

/// Embedding r_t' of one observation (1 × r).
RealArray encode(const NpParams& params, const Observation& obs);
/// Embeddings of every row of (x, y).
RealArray encode_batch(const NpParams& params, const RealArray& x, const RealArray& y);

/// Cosine similarity of mean embeddings followed by the softmax above.
SimilarityVector dataset_similarity(const RealArray& target_embeddings,
                                    std::span<const RealArray> task_embeddings);

/// Dataset-aware multi-head attention for each query row.
AttentionOutput attend(const NpParams& params, const RealArray& queries, const KeySet& in_dataset,
                       std::span<const KeySet> across, const SimilarityVector& similarity);

GaussianPrediction decode(const NpParams& params, const RealArray& representation,
                          const RealArray& query);

/// encode → dataset_similarity → attend → decode for every query row.
std::vector<GaussianPrediction> predict(const NpParams& params, const RealArray& queries,
                                        const HistorySet& target,
                                        std::span<const HistorySet> historical = {});

/// Attentive prediction over in-dataset observations with no similarity
/// modulation at all; predict() with no historical sets must match it bit for bit.
std::vector<GaussianPrediction> predict_in_dataset_only(const NpParams& params,
                                                        const RealArray& queries,
                                                        const HistorySet& target);

/// Mean per-point Gaussian negative log-likelihood of held_out given context
/// (and optional historical sets in the attention).
double np_loss(const NpParams& params, const HistorySet& held_out, const HistorySet& context,
               std::span<const HistorySet> historical = {});

struct LossGrad {
  double loss = 0.0;
  NpParams grad;
};

LossGrad np_loss_grad(const NpParams& params, const HistorySet& held_out,
                      const HistorySet& context, std::span<const HistorySet> historical = {});

/// Seeded shuffle followed by a uniform split point in [1, n-1].
/// Returns (held_out, context); both non-empty.
std::pair<HistorySet, HistorySet> split_history(const HistorySet& h, Rng& rng);

struct TrainExample {
  HistorySet held_out;
  HistorySet context;
  std::vector<HistorySet> historical;
};

/// Mean loss and gradient over a batch.
LossGrad batch_loss_grad(const NpParams& params, std::span<const TrainExample> batch);

/// One Adam step on the mean batch loss; returns the loss before the step.
double train_step(NpParams& params, nn::AdamState& adam, std::span<const TrainExample> batch);
nn::AdamState make_adam(const NpParams& params, nn::AdamConfig config);

/// Mean of μ̂ under a softmax weighting exp(α μ̂_j) / Σ exp(α μ̂_j'), plus its
/// gradient with respect to each configuration row.
struct InitConfigLoss {
  double value = 0.0;
  std::vector<double> means;
  RealArray grad_configs;  // n_I × d
};

InitConfigLoss init_config_loss(const NpParams& params, const RealArray& configs,
                                const HistorySet& context, std::span<const HistorySet> historical,
                                double softmax_temperature);

namespace detail {

/// Parameters registered on a tape.
struct BoundParams {
  nn::BoundMlp encoder;
  nn::BoundMlp key_net;
  nn::BoundMlp decoder;
  std::vector<std::array<nn::Var, 3>> heads;
};

BoundParams bind_params(nn::Tape& tape, const NpParams& params, bool trainable);
NpParams collect_grads(const nn::Tape& tape, const BoundParams& bound, const NpParams& like);

struct ObservationVars {
  nn::Var x;
  nn::Var y;
  Index count = 0;
};

struct ForwardVars {
  nn::Var mean;    // queries × 1
  nn::Var stddev;  // queries × 1
  nn::Var similarity;
  std::vector<nn::Var> head_weights;
};

/// Full recorded forward pass. With use_similarity == false the logits are
/// never modulated, giving the plain attentive path.
ForwardVars forward(nn::Tape& tape, const BoundParams& bound, const NpConfig& config,
                    nn::Var queries, const ObservationVars& context,
                    std::span<const ObservationVars> historical, bool use_similarity);

nn::Var gaussian_nll(nn::Tape& tape, const ForwardVars& out, nn::Var targets);

}  // namespace detail

}  // namespace tnp::np
