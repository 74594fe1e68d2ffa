#include "tnp/np/pretrain.hpp"

#include "tnp/errors.hpp"
#include "tnp/np/model.hpp"
#include "tnp/tasks/gp_sampler.hpp"

namespace tnp::np {

void PretrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("pretrain: batch_size must be positive");
  if (!(learning_rate >= 0.0)) throw ConfigError("pretrain: learning rate must be non-negative");
  if (!(length_scale_min > 0.0 && length_scale_min <= length_scale_max)) {
    throw ConfigError("pretrain: invalid length-scale range");
  }
  if (!(kernel_scale > 0.0)) throw ConfigError("pretrain: kernel scale must be positive");
  if (min_points < 2 || min_points > max_points) throw ConfigError("pretrain: invalid point range");
  if (dim == 0) throw ConfigError("pretrain: dimension must be positive");
}

HistorySet sample_prior_history(const PretrainConfig& config, Rng& rng, std::size_t points) {
  const std::size_t n = points != 0 ? points : rng.uniform_int(config.min_points, config.max_points);
  const double ls = rng.uniform(config.length_scale_min, config.length_scale_max);
  RealArray x(static_cast<Index>(n), static_cast<Index>(config.dim));
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform();
  }
  const Eigen::VectorXd y = tasks::sample_gp_values(x, ls, config.kernel_scale, rng);
  HistorySet h("prior", config.dim);
  for (Index i = 0; i < x.rows(); ++i) {
    std::vector<double> xi(config.dim);
    for (Index j = 0; j < x.cols(); ++j) xi[static_cast<std::size_t>(j)] = x(i, j);
    h.add({std::move(xi), y(i)});
  }
  return config.standardize ? standardized(h) : h;
}

PretrainResult pretrain(NpParams params, const PretrainConfig& config,
                        const PretrainProgress& progress) {
  config.validate();
  if (static_cast<std::size_t>(params.config.d) != config.dim) {
    throw ConfigError("pretrain: model dimension does not match the prior dimension");
  }
  Rng rng(config.seed);
  nn::AdamConfig adam_config;
  adam_config.learning_rate = config.learning_rate;
  nn::AdamState adam = make_adam(params, adam_config);
  PretrainResult result;
  result.losses.reserve(config.batches);
  std::vector<TrainExample> batch(config.batch_size);
  for (std::size_t b = 0; b < config.batches; ++b) {
    for (auto& ex : batch) {
      const HistorySet h = sample_prior_history(config, rng);
      auto [held_out, context] = split_history(h, rng);
      ex.held_out = std::move(held_out);
      ex.context = std::move(context);
    }
    const double loss = train_step(params, adam, batch);
    result.losses.push_back(loss);
    if (progress) progress(b, loss);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace tnp::np
