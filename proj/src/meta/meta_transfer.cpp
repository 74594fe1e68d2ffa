#include "tnp/meta/meta_transfer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <spdlog/spdlog.h>

#include "tnp/errors.hpp"

namespace tnp::meta {

void MetaState::validate() const {
  theta.validate();
  if (init_configs.rows() < 1) throw ConfigError("meta state: need at least one initial configuration");
  if (init_configs.cols() != theta.config.d) {
    throw ConfigError("meta state: initial configurations do not match the model dimension");
  }
  if ((init_configs.array() < 0.0).any() || (init_configs.array() > 1.0).any() ||
      !init_configs.allFinite()) {
    throw ConfigError("meta state: initial configurations must lie in [0,1]^d");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("meta state: epsilon must be in [0,1]");
  if (!(alpha_inner >= 0.0)) throw ConfigError("meta state: alpha_inner must be non-negative");
  if (!(init_lr >= 0.0)) throw ConfigError("meta state: init_lr must be non-negative");
  if (!std::isfinite(softmax_temperature)) throw ConfigError("meta state: bad softmax temperature");
}

MetaState make_meta_state(NpParams theta, std::size_t n_init, std::uint64_t seed) {
  MetaState s;
  const Index d = theta.config.d;
  s.theta = std::move(theta);
  Rng rng(seed);
  s.init_configs.resize(static_cast<Index>(n_init), d);
  for (Index i = 0; i < s.init_configs.rows(); ++i) {
    for (Index j = 0; j < d; ++j) s.init_configs(i, j) = rng.uniform();
  }
  s.validate();
  return s;
}

NpParams inner_adapt(const NpParams& theta, const HistorySet& h, std::span<const HistorySet> others,
                     std::size_t k, double alpha_inner, Rng& rng) {
  if (h.size() < 2) throw ContractError("inner_adapt: need at least two observations");
  NpParams adapted = theta;
  for (std::size_t step = 0; step < k; ++step) {
    const auto [held_out, context] = np::split_history(h, rng);
    const np::LossGrad lg = np::np_loss_grad(adapted, held_out, context, others);
    if (!std::isfinite(lg.loss)) throw NumericError("inner_adapt: non-finite loss");
    auto params = adapted.tensors();
    const auto grads = lg.grad.tensors();
    for (std::size_t i = 0; i < params.size(); ++i) *params[i] -= alpha_inner * *grads[i];
  }
  return adapted;
}

NpParams fine_tune(const NpParams& theta, const HistorySet& h, std::span<const HistorySet> others,
                   std::size_t k, double alpha_inner, Rng& rng) {
  if (h.size() < 2) {
    spdlog::debug("fine_tune: {} observation(s) on {}, keeping the transferable initialization",
                  h.size(), h.task_id());
    return theta;
  }
  return inner_adapt(theta, h, others, k, alpha_inner, rng);
}

NpParams reptile_update(const NpParams& theta, const NpParams& adapted, double epsilon) {
  NpParams out = theta;
  auto dst = out.tensors();
  const auto src = adapted.tensors();
  if (dst.size() != src.size()) throw ConfigError("reptile_update: parameter sets differ");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (dst[i]->rows() != src[i]->rows() || dst[i]->cols() != src[i]->cols()) {
      throw ConfigError("reptile_update: parameter shapes differ");
    }
    *dst[i] = (1.0 - epsilon) * *dst[i] + epsilon * *src[i];
  }
  return out;
}

RealArray interpolate_configs(const RealArray& base, const RealArray& adapted, double epsilon) {
  if (base.rows() != adapted.rows() || base.cols() != adapted.cols()) {
    throw ConfigError("interpolate_configs: shapes differ");
  }
  return (1.0 - epsilon) * base + epsilon * adapted;
}

RealArray step_configs(RealArray configs, const ConfigGradient& gradient, std::size_t k, double lr,
                       bool ascend) {
  const double sign = ascend ? 1.0 : -1.0;
  for (std::size_t step = 0; step < k; ++step) {
    const RealArray g = gradient(configs);
    if (!g.allFinite()) throw NumericError("step_configs: non-finite gradient");
    configs = (configs + sign * lr * g).cwiseMax(0.0).cwiseMin(1.0);
  }
  return configs;
}

RealArray adapt_init_configs(const RealArray& configs, const NpParams& theta, const HistorySet& h,
                             std::span<const HistorySet> others, std::size_t k, double lr,
                             double softmax_temperature, bool ascend) {
  const ConfigGradient grad = [&](const RealArray& x) {
    return np::init_config_loss(theta, x, h, others, softmax_temperature).grad_configs;
  };
  return step_configs(configs, grad, k, lr, ascend);
}

MetaState meta_train(MetaState state, std::span<const HistorySet> bundle, std::size_t epochs,
                     std::uint64_t seed, MetaTrainStats* stats) {
  state.validate();
  if (bundle.empty()) throw ContractError("meta_train: need at least one historical task");
  const std::vector<HistorySet> tasks = np::standardized(bundle);
  for (const auto& t : tasks) {
    if (t.size() < 2) throw ContractError("meta_train: task " + t.task_id() + " has fewer than 2 observations");
  }

  Rng rng(seed);
  std::vector<std::size_t> order(tasks.size());
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (const std::size_t m : order) {
      std::vector<HistorySet> others;
      others.reserve(tasks.size() - 1);
      for (std::size_t j = 0; j < tasks.size(); ++j) {
        if (j != m) others.push_back(tasks[j]);
      }
      if (stats != nullptr) {
        Rng probe = rng.split(m);
        const auto [held_out, context] = np::split_history(tasks[m], probe);
        loss_sum += np::np_loss(state.theta, held_out, context, others);
      }
      const NpParams adapted =
          inner_adapt(state.theta, tasks[m], others, state.k, state.alpha_inner, rng);
      state.theta = reptile_update(state.theta, adapted, state.epsilon);
      const RealArray configs_k =
          adapt_init_configs(state.init_configs, adapted, tasks[m], others, state.k, state.init_lr,
                             state.softmax_temperature, state.ascend);
      state.init_configs = interpolate_configs(state.init_configs, configs_k, state.epsilon);
    }
    if (stats != nullptr) stats->epoch_mean_loss.push_back(loss_sum / static_cast<double>(tasks.size()));
  }
  return state;
}

nlohmann::json to_json(const MetaState& s) {
  nlohmann::json configs = nlohmann::json::array();
  for (Index i = 0; i < s.init_configs.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(s.init_configs.cols()));
    for (Index j = 0; j < s.init_configs.cols(); ++j) row[static_cast<std::size_t>(j)] = s.init_configs(i, j);
    configs.push_back(row);
  }
  return {{"theta", np::to_json(s.theta)},
          {"init_configs", configs},
          {"epsilon", s.epsilon},
          {"alpha_inner", s.alpha_inner},
          {"k", s.k},
          {"softmax_temperature", s.softmax_temperature},
          {"init_lr", s.init_lr},
          {"ascend", s.ascend}};
}

MetaState meta_state_from_json(const nlohmann::json& doc) {
  try {
    MetaState s;
    s.theta = np::np_params_from_json(doc.at("theta"));
    const auto& configs = doc.at("init_configs");
    s.init_configs.resize(static_cast<Index>(configs.size()), s.theta.config.d);
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const auto row = configs[i].get<std::vector<double>>();
      if (static_cast<Index>(row.size()) != s.theta.config.d) {
        throw ConfigError("meta state: initial configuration has the wrong dimension");
      }
      for (std::size_t j = 0; j < row.size(); ++j) {
        s.init_configs(static_cast<Index>(i), static_cast<Index>(j)) = row[j];
      }
    }
    s.epsilon = doc.at("epsilon").get<double>();
    s.alpha_inner = doc.at("alpha_inner").get<double>();
    s.k = doc.at("k").get<std::size_t>();
    s.softmax_temperature = doc.value("softmax_temperature", 5.0);
    s.init_lr = doc.value("init_lr", s.alpha_inner);
    s.ascend = doc.value("ascend", true);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("meta state checkpoint: ") + e.what());
  }
}

void save_meta_state(const MetaState& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << to_json(s).dump() << '\n';
}

MetaState load_meta_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return meta_state_from_json(doc);
}

}  // namespace tnp::meta
