#include "tnp/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "tnp/errors.hpp"
#include "tnp/rng.hpp"

namespace tnp::nn {

void Mlp::validate() const {
  if (layers.empty()) throw ConfigError("mlp: no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const DenseLayer& l = layers[i];
    if (l.bias.rows() != 1 || l.bias.cols() != l.weight.cols()) {
      throw ConfigError("mlp: bias of layer " + std::to_string(i) + " does not match weight");
    }
    if (i + 1 < layers.size() && l.weight.cols() != layers[i + 1].weight.rows()) {
      throw ConfigError("mlp: layer " + std::to_string(i) + " output does not feed layer " +
                        std::to_string(i + 1));
    }
  }
}

Mlp init_params(std::uint64_t seed, const MlpSpec& spec) {
  if (spec.in <= 0 || spec.out <= 0) throw ConfigError("mlp spec: dimensions must be positive");
  std::vector<Index> dims{spec.in};
  dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
  dims.push_back(spec.out);

  Mlp net;
  net.seed = seed;
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const Index fan_in = dims[i];
    const Index fan_out = dims[i + 1];
    if (fan_out <= 0) throw ConfigError("mlp spec: hidden widths must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    DenseLayer layer;
    layer.weight.resize(fan_in, fan_out);
    for (Index r = 0; r < fan_in; ++r) {
      for (Index c = 0; c < fan_out; ++c) layer.weight(r, c) = rng.uniform(-limit, limit);
    }
    layer.bias = RealArray::Zero(1, fan_out);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

BoundMlp bind(Tape& tape, const Mlp& net, bool trainable) {
  BoundMlp bound;
  for (const DenseLayer& l : net.layers) {
    bound.weights.push_back(trainable ? tape.variable(l.weight) : tape.constant(l.weight));
    bound.biases.push_back(trainable ? tape.variable(l.bias) : tape.constant(l.bias));
  }
  return bound;
}

Mlp collect_grads(const Tape& tape, const BoundMlp& bound, const Mlp& like) {
  Mlp g;
  g.seed = like.seed;
  for (std::size_t i = 0; i < bound.weights.size(); ++i) {
    g.layers.push_back({tape.grad(bound.weights[i]), tape.grad(bound.biases[i])});
  }
  return g;
}

Var mlp_forward(Tape& tape, const BoundMlp& net, Var x) {
  if (net.weights.empty()) throw ConfigError("mlp_forward: empty network");
  const Index expected = tape.value(net.weights.front()).rows();
  if (tape.value(x).cols() != expected) {
    throw ConfigError("mlp_forward: input has " + std::to_string(tape.value(x).cols()) +
                      " columns, network expects " + std::to_string(expected));
  }
  Var h = x;
  for (std::size_t i = 0; i < net.weights.size(); ++i) {
    h = tape.add_row(tape.matmul(h, net.weights[i]), net.biases[i]);
    if (i + 1 < net.weights.size()) h = tape.relu(h);
  }
  return h;
}

RealArray mlp_forward(const Mlp& net, const RealArray& x) {
  if (net.layers.empty()) throw ConfigError("mlp_forward: empty network");
  if (x.cols() != net.in_dim()) {
    throw ConfigError("mlp_forward: input has " + std::to_string(x.cols()) +
                      " columns, network expects " + std::to_string(net.in_dim()));
  }
  RealArray h = x;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    RealArray z = h * net.layers[i].weight;
    z.rowwise() += net.layers[i].bias.row(0);
    if (i + 1 < net.layers.size()) z = z.cwiseMax(0.0);
    h = std::move(z);
  }
  return h;
}

std::vector<double> to_row_major(const RealArray& a) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(a.size()));
  for (Index r = 0; r < a.rows(); ++r) {
    for (Index c = 0; c < a.cols(); ++c) out.push_back(a(r, c));
  }
  return out;
}

RealArray from_row_major(const std::vector<double>& values, Index rows, Index cols) {
  if (static_cast<Index>(values.size()) != rows * cols) {
    throw ConfigError("checkpoint: array has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(rows * cols));
  }
  RealArray a(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) a(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  }
  if (!all_finite(a)) throw NumericError("checkpoint: non-finite parameter value");
  return a;
}

nlohmann::json to_json(const Mlp& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const DenseLayer& l : net.layers) {
    layers.push_back({{"w", to_row_major(l.weight)},
                      {"b", to_row_major(l.bias)},
                      {"in", l.weight.rows()},
                      {"out", l.weight.cols()}});
  }
  return {{"layers", layers}, {"seed", net.seed}};
}

Mlp mlp_from_json(const nlohmann::json& doc) {
  Mlp net;
  net.seed = doc.value("seed", std::uint64_t{0});
  for (const auto& l : doc.at("layers")) {
    const Index in = l.at("in").get<Index>();
    const Index out = l.at("out").get<Index>();
    net.layers.push_back({from_row_major(l.at("w").get<std::vector<double>>(), in, out),
                          from_row_major(l.at("b").get<std::vector<double>>(), 1, out)});
  }
  net.validate();
  return net;
}

}  // namespace tnp::nn
