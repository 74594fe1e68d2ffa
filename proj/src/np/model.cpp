#include "tnp/np/model.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "tnp/errors.hpp"

namespace tnp::np {

using nn::Tape;
using nn::Var;

double SimilarityVector::task_mass(std::size_t m) const {
  std::size_t offset = 1;
  for (std::size_t i = 0; i < m; ++i) offset += task_sizes.at(i);
  double total = 0.0;
  for (std::size_t j = 0; j < task_sizes.at(m); ++j) total += weights[offset + j];
  return total;
}

namespace detail {

BoundParams bind_params(Tape& tape, const NpParams& params, bool trainable) {
  BoundParams b;
  b.encoder = nn::bind(tape, params.encoder, trainable);
  b.key_net = nn::bind(tape, params.key_net, trainable);
  b.decoder = nn::bind(tape, params.decoder, trainable);
  for (const auto& h : params.heads) {
    if (trainable) {
      b.heads.push_back({tape.variable(h.wq), tape.variable(h.wk), tape.variable(h.wv)});
    } else {
      b.heads.push_back({tape.constant(h.wq), tape.constant(h.wk), tape.constant(h.wv)});
    }
  }
  return b;
}

NpParams collect_grads(const Tape& tape, const BoundParams& bound, const NpParams& like) {
  NpParams g;
  g.config = like.config;
  g.encoder = nn::collect_grads(tape, bound.encoder, like.encoder);
  g.key_net = nn::collect_grads(tape, bound.key_net, like.key_net);
  g.decoder = nn::collect_grads(tape, bound.decoder, like.decoder);
  for (const auto& h : bound.heads) {
    g.heads.push_back({tape.grad(h[0]), tape.grad(h[1]), tape.grad(h[2])});
  }
  return g;
}

namespace {

double logit_divisor(const NpConfig& c) {
  return c.attention_scale == AttentionScale::kSqrtR
             ? std::sqrt(static_cast<double>(c.r))
             : std::sqrt(static_cast<double>(c.head_dim()));
}

Var encode_vars(Tape& tape, const BoundParams& bound, const ObservationVars& obs) {
  const Var parts[] = {obs.x, obs.y};
  return nn::mlp_forward(tape, bound.encoder, tape.concat_cols(parts));
}

// s over [1, s^1 1_{T^1}, ...] from mean embeddings.
Var similarity_vars(Tape& tape, Var target_r, std::span<const Var> task_r,
                    std::span<const Index> task_sizes, std::vector<Var>* cosines = nullptr) {
  RealArray one = RealArray::Ones(1, 1);
  std::vector<Var> logits{tape.constant(one)};
  if (!task_r.empty()) {
    const Var target_mean = tape.mean_rows(target_r);
    for (std::size_t m = 0; m < task_r.size(); ++m) {
      const Var cos = tape.cosine(target_mean, tape.mean_rows(task_r[m]));
      if (cosines != nullptr) cosines->push_back(cos);
      logits.push_back(tape.repeat(cos, task_sizes[m]));
    }
  }
  return tape.softmax_rows(tape.concat_cols(logits));
}

// Expands s to one entry per key: the in-dataset slot is broadcast.
Var modulation_vars(Tape& tape, Var similarity, Index in_dataset_count) {
  const Index across = tape.value(similarity).cols() - 1;
  const Var in_slot = tape.repeat(tape.slice_cols(similarity, 0, 1), in_dataset_count);
  if (across == 0) return in_slot;
  const Var parts[] = {in_slot, tape.slice_cols(similarity, 1, across)};
  return tape.concat_cols(parts);
}

Var attention_vars(Tape& tape, const BoundParams& bound, const NpConfig& config, Var query_keys,
                   Var keys, Var values, const Var* modulation, std::vector<Var>* head_weights) {
  const double inv_scale = 1.0 / logit_divisor(config);
  std::vector<Var> heads;
  heads.reserve(bound.heads.size());
  for (const auto& h : bound.heads) {
    const Var q = tape.matmul(query_keys, h[0]);
    const Var k = tape.matmul(keys, h[1]);
    const Var v = tape.matmul(values, h[2]);
    Var logits = tape.scale(tape.matmul_bt(q, k), inv_scale);
    if (modulation != nullptr) logits = tape.mul_row(logits, *modulation);
    const Var weights = tape.softmax_rows(logits);
    if (head_weights != nullptr) head_weights->push_back(weights);
    heads.push_back(tape.matmul(weights, v));
  }
  return tape.concat_cols(heads);
}

ForwardVars decode_vars(Tape& tape, const BoundParams& bound, const NpConfig& config,
                        Var representation, Var queries) {
  const Var parts[] = {representation, queries};
  const Var out = nn::mlp_forward(tape, bound.decoder, tape.concat_cols(parts));
  ForwardVars f;
  f.mean = tape.slice_cols(out, 0, 1);
  f.stddev = tape.add_scalar(tape.softplus(tape.slice_cols(out, 1, 1)), config.sigma_floor);
  return f;
}

ObservationVars constant_obs(Tape& tape, const HistorySet& h) {
  return {tape.constant(h.x_matrix()), tape.constant(h.y_column()), static_cast<Index>(h.size())};
}

void check_dim(const NpConfig& config, const HistorySet& h) {
  if (!h.empty() && static_cast<Index>(h.dim()) != config.d) {
    throw ConfigError("history " + h.task_id() + " has dimension " + std::to_string(h.dim()) +
                      ", model expects " + std::to_string(config.d));
  }
}

void check_queries(const NpConfig& config, const RealArray& queries) {
  if (queries.cols() != config.d) {
    throw ConfigError("queries have " + std::to_string(queries.cols()) +
                      " columns, model expects " + std::to_string(config.d));
  }
}

}  // namespace

ForwardVars forward(Tape& tape, const BoundParams& bound, const NpConfig& config, Var queries,
                    const ObservationVars& context, std::span<const ObservationVars> historical,
                    bool use_similarity) {
  if (context.count == 0) throw ContractError("forward: empty in-dataset context");
  const Var context_r = encode_vars(tape, bound, context);

  std::vector<Var> key_x{context.x};
  std::vector<Var> values{context_r};
  std::vector<Var> task_r;
  std::vector<Index> task_sizes;
  for (const auto& h : historical) {
    if (h.count == 0) throw ContractError("forward: historical task without observations");
    const Var r = encode_vars(tape, bound, h);
    key_x.push_back(h.x);
    values.push_back(r);
    task_r.push_back(r);
    task_sizes.push_back(h.count);
  }

  Var similarity;
  Var modulation;
  if (use_similarity) {
    similarity = similarity_vars(tape, context_r, task_r, task_sizes);
    modulation = modulation_vars(tape, similarity, context.count);
  }

  const Var keys = nn::mlp_forward(tape, bound.key_net, tape.concat_rows(key_x));
  const Var query_keys = nn::mlp_forward(tape, bound.key_net, queries);
  std::vector<Var> head_weights;
  const Var representation =
      attention_vars(tape, bound, config, query_keys, keys, tape.concat_rows(values),
                     use_similarity ? &modulation : nullptr, &head_weights);
  ForwardVars out = decode_vars(tape, bound, config, representation, queries);
  out.similarity = similarity;
  out.head_weights = std::move(head_weights);
  return out;
}

Var gaussian_nll(Tape& tape, const ForwardVars& out, Var targets) {
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const Var z = tape.div(tape.sub(targets, out.mean), out.stddev);
  const Var per_point =
      tape.add_scalar(tape.add(tape.log(out.stddev), tape.scale(tape.square(z), 0.5)), half_log_2pi);
  return tape.mean(per_point);
}

}  // namespace detail

using detail::check_dim;
using detail::check_queries;
using detail::constant_obs;
using detail::encode_vars;
using detail::similarity_vars;
using detail::modulation_vars;
using detail::attention_vars;
using detail::decode_vars;

using detail::BoundParams;
using detail::ObservationVars;

RealArray encode(const NpParams& params, const Observation& obs) {
  if (static_cast<Index>(obs.x.size()) != params.config.d) {
    throw ConfigError("encode: observation dimension does not match the model");
  }
  RealArray x(1, params.config.d);
  for (Index j = 0; j < params.config.d; ++j) x(0, j) = obs.x[static_cast<std::size_t>(j)];
  RealArray y(1, 1);
  y(0, 0) = obs.y;
  return encode_batch(params, x, y);
}

RealArray encode_batch(const NpParams& params, const RealArray& x, const RealArray& y) {
  if (x.cols() != params.config.d || y.cols() != 1 || x.rows() != y.rows()) {
    throw ConfigError("encode: expected x (n × d) and y (n × 1)");
  }
  RealArray input(x.rows(), x.cols() + 1);
  input << x, y;
  return nn::mlp_forward(params.encoder, input);
}

SimilarityVector dataset_similarity(const RealArray& target_embeddings,
                                    std::span<const RealArray> task_embeddings) {
  if (target_embeddings.rows() == 0) throw ContractError("dataset_similarity: empty target");
  Tape tape;
  const Var target = tape.constant(target_embeddings);
  std::vector<Var> tasks;
  std::vector<Index> sizes;
  for (const auto& e : task_embeddings) {
    if (e.rows() == 0) throw ContractError("dataset_similarity: historical task without embeddings");
    tasks.push_back(tape.constant(e));
    sizes.push_back(e.rows());
  }
  std::vector<Var> cosines;
  const Var s = detail::similarity_vars(tape, target, tasks, sizes, &cosines);
  SimilarityVector out;
  const RealArray& w = tape.value(s);
  out.weights.assign(w.data(), w.data() + w.size());
  for (std::size_t m = 0; m < tasks.size(); ++m) {
    out.cosines.push_back(tape.value(cosines[m])(0, 0));
    out.task_sizes.push_back(static_cast<std::size_t>(sizes[m]));
  }
  return out;
}

AttentionOutput attend(const NpParams& params, const RealArray& queries, const KeySet& in_dataset,
                       std::span<const KeySet> across, const SimilarityVector& similarity) {
  check_queries(params.config, queries);
  Index total = in_dataset.x.rows();
  for (const auto& k : across) total += k.x.rows();
  if (total == 0) throw ContractError("attend: no keys");
  std::size_t expected = 1;
  for (const auto& k : across) expected += static_cast<std::size_t>(k.x.rows());
  if (similarity.weights.size() != expected) {
    throw ContractError("attend: similarity vector length does not match the key sets");
  }

  Tape tape;
  const BoundParams bound = detail::bind_params(tape, params, false);
  std::vector<Var> key_x;
  std::vector<Var> values;
  if (in_dataset.x.rows() > 0) {
    key_x.push_back(tape.constant(in_dataset.x));
    values.push_back(tape.constant(in_dataset.r));
  }
  for (const auto& k : across) {
    if (k.x.rows() != k.r.rows()) throw ContractError("attend: key/value rows differ");
    if (k.x.rows() == 0) continue;
    key_x.push_back(tape.constant(k.x));
    values.push_back(tape.constant(k.r));
  }
  RealArray s(1, static_cast<Index>(similarity.weights.size()));
  for (Index i = 0; i < s.cols(); ++i) s(0, i) = similarity.weights[static_cast<std::size_t>(i)];
  const Var modulation = detail::modulation_vars(tape, tape.constant(s), in_dataset.x.rows());

  const Var keys = nn::mlp_forward(tape, bound.key_net, tape.concat_rows(key_x));
  const Var query_keys = nn::mlp_forward(tape, bound.key_net, tape.constant(queries));
  std::vector<Var> weights;
  const Var rep = detail::attention_vars(tape, bound, params.config, query_keys, keys,
                                         tape.concat_rows(values), &modulation, &weights);
  AttentionOutput out;
  out.representation = tape.value(rep);
  for (Var w : weights) out.head_weights.push_back(tape.value(w));
  return out;
}

GaussianPrediction decode(const NpParams& params, const RealArray& representation,
                          const RealArray& query) {
  if (representation.rows() != 1 || representation.cols() != params.config.r) {
    throw ConfigError("decode: representation must be 1 × r");
  }
  check_queries(params.config, query);
  if (!representation.allFinite()) throw NumericError("decode: non-finite representation");
  Tape tape;
  const BoundParams bound = detail::bind_params(tape, params, false);
  const auto f = detail::decode_vars(tape, bound, params.config, tape.constant(representation),
                                     tape.constant(query));
  return {tape.value(f.mean)(0, 0), tape.value(f.stddev)(0, 0)};
}

namespace {

std::vector<GaussianPrediction> run_prediction(const NpParams& params, const RealArray& queries,
                                               const HistorySet& target,
                                               std::span<const HistorySet> historical,
                                               bool use_similarity) {
  check_queries(params.config, queries);
  if (target.empty()) throw ContractError("predict: target history is empty");
  check_dim(params.config, target);
  Tape tape;
  const BoundParams bound = detail::bind_params(tape, params, false);
  const ObservationVars context = constant_obs(tape, target);
  std::vector<ObservationVars> hist;
  for (const auto& h : historical) {
    check_dim(params.config, h);
    hist.push_back(constant_obs(tape, h));
  }
  const auto f = detail::forward(tape, bound, params.config, tape.constant(queries), context, hist,
                                 use_similarity);
  const RealArray& mu = tape.value(f.mean);
  const RealArray& sd = tape.value(f.stddev);
  std::vector<GaussianPrediction> out(static_cast<std::size_t>(queries.rows()));
  for (Index i = 0; i < queries.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = {mu(i, 0), sd(i, 0)};
  }
  return out;
}

}  // namespace

std::vector<GaussianPrediction> predict(const NpParams& params, const RealArray& queries,
                                        const HistorySet& target,
                                        std::span<const HistorySet> historical) {
  return run_prediction(params, queries, target, historical, true);
}

std::vector<GaussianPrediction> predict_in_dataset_only(const NpParams& params,
                                                        const RealArray& queries,
                                                        const HistorySet& target) {
  return run_prediction(params, queries, target, {}, false);
}

namespace {

Var example_loss(Tape& tape, const BoundParams& bound, const NpConfig& config,
                 const HistorySet& held_out, const HistorySet& context,
                 std::span<const HistorySet> historical) {
  if (held_out.empty() || context.empty()) {
    throw ContractError("np_loss: held-out and context parts must be non-empty");
  }
  check_dim(config, held_out);
  check_dim(config, context);
  const ObservationVars ctx = constant_obs(tape, context);
  std::vector<ObservationVars> hist;
  for (const auto& h : historical) {
    check_dim(config, h);
    hist.push_back(constant_obs(tape, h));
  }
  const auto f = detail::forward(tape, bound, config, tape.constant(held_out.x_matrix()), ctx, hist,
                                 true);
  return detail::gaussian_nll(tape, f, tape.constant(held_out.y_column()));
}

}  // namespace

double np_loss(const NpParams& params, const HistorySet& held_out, const HistorySet& context,
               std::span<const HistorySet> historical) {
  Tape tape;
  const BoundParams bound = detail::bind_params(tape, params, false);
  return tape.value(example_loss(tape, bound, params.config, held_out, context, historical))(0, 0);
}

LossGrad np_loss_grad(const NpParams& params, const HistorySet& held_out,
                      const HistorySet& context, std::span<const HistorySet> historical) {
  Tape tape;
  const BoundParams bound = detail::bind_params(tape, params, true);
  const Var loss = example_loss(tape, bound, params.config, held_out, context, historical);
  tape.backward(loss);
  return {tape.value(loss)(0, 0), detail::collect_grads(tape, bound, params)};
}

std::pair<HistorySet, HistorySet> split_history(const HistorySet& h, Rng& rng) {
  if (h.size() < 2) throw ContractError("split_history: need at least two observations");
  std::vector<std::size_t> order(h.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  const std::size_t held = rng.uniform_int(1, h.size() - 1);
  HistorySet held_out(h.task_id(), h.dim());
  HistorySet context(h.task_id(), h.dim());
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < held ? held_out : context).add(h[order[i]]);
  }
  return {std::move(held_out), std::move(context)};
}

LossGrad batch_loss_grad(const NpParams& params, std::span<const TrainExample> batch) {
  if (batch.empty()) throw ContractError("train_step: empty batch");
  Tape tape;
  const BoundParams bound = detail::bind_params(tape, params, true);
  std::vector<Var> losses;
  losses.reserve(batch.size());
  for (const auto& ex : batch) {
    losses.push_back(example_loss(tape, bound, params.config, ex.held_out, ex.context, ex.historical));
  }
  const Var total = tape.scale(tape.sum(tape.concat_cols(losses)), 1.0 / static_cast<double>(batch.size()));
  tape.backward(total);
  return {tape.value(total)(0, 0), detail::collect_grads(tape, bound, params)};
}

nn::AdamState make_adam(const NpParams& params, nn::AdamConfig config) {
  const auto tensors = params.tensors();
  return nn::AdamState(config, tensors);
}

double train_step(NpParams& params, nn::AdamState& adam, std::span<const TrainExample> batch) {
  LossGrad lg = batch_loss_grad(params, batch);
  if (!std::isfinite(lg.loss)) {
    throw NumericError("train_step: non-finite loss at Adam step " + std::to_string(adam.step + 1));
  }
  const auto grads = lg.grad.tensors();
  const auto tensors = params.tensors();
  nn::adam_step(tensors, grads, adam);
  return lg.loss;
}

InitConfigLoss init_config_loss(const NpParams& params, const RealArray& configs,
                                const HistorySet& context, std::span<const HistorySet> historical,
                                double softmax_temperature) {
  check_queries(params.config, configs);
  if (configs.rows() == 0) throw ContractError("init_config_loss: no configurations");
  if (context.empty()) throw ContractError("init_config_loss: empty context");
  Tape tape;
  const BoundParams bound = detail::bind_params(tape, params, false);
  const Var queries = tape.variable(configs);
  const ObservationVars ctx = constant_obs(tape, context);
  std::vector<ObservationVars> hist;
  for (const auto& h : historical) hist.push_back(constant_obs(tape, h));
  const auto f = detail::forward(tape, bound, params.config, queries, ctx, hist, true);
  const Var means_row = tape.transpose(f.mean);
  const Var weights = tape.softmax_rows(tape.scale(means_row, softmax_temperature));
  const Var loss = tape.sum(tape.mul(weights, means_row));
  tape.backward(loss);

  InitConfigLoss out;
  out.value = tape.value(loss)(0, 0);
  const RealArray& mu = tape.value(f.mean);
  out.means.assign(mu.data(), mu.data() + mu.size());
  out.grad_configs = tape.grad(queries);
  return out;
}

}  // namespace tnp::np
