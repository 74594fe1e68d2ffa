#include "tnp/nn/adam.hpp"

#include <cmath>
#include <string>

#include "tnp/errors.hpp"

namespace tnp::nn {

AdamState::AdamState(AdamConfig cfg, std::span<const RealArray* const> params) : config(cfg) {
  for (const RealArray* p : params) {
    first_moment.push_back(RealArray::Zero(p->rows(), p->cols()));
    second_moment.push_back(RealArray::Zero(p->rows(), p->cols()));
  }
}

void adam_step(std::span<RealArray* const> params, std::span<const RealArray* const> grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw ConfigError("adam_step: parameter, gradient and state counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const RealArray& g = *grads[i];
    if (g.rows() != params[i]->rows() || g.cols() != params[i]->cols() ||
        state.first_moment[i].rows() != g.rows() || state.first_moment[i].cols() != g.cols()) {
      throw ConfigError("adam_step: shape mismatch at tensor " + std::to_string(i));
    }
    if (!all_finite(g)) {
      throw NumericError("adam_step: non-finite gradient in tensor " + std::to_string(i) +
                         " at step " + std::to_string(state.step + 1));
    }
  }

  const AdamConfig& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    RealArray& m = state.first_moment[i];
    RealArray& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * *grads[i];
    v = c.beta2 * v + (1.0 - c.beta2) * grads[i]->cwiseAbs2();
    params[i]->array() -= c.learning_rate * (m.array() / correction1) /
                          ((v.array() / correction2).sqrt() + c.epsilon);
  }
}

}  // namespace tnp::nn
