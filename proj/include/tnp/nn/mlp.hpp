#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "tnp/nn/real_array.hpp"
#include "tnp/nn/tape.hpp"

namespace tnp::nn {

struct DenseLayer {
  RealArray weight;  // in × out
  RealArray bias;    // 1 × out
};

/// Multilayer perceptron: ReLU after every hidden layer, identity output.
struct Mlp {
  std::vector<DenseLayer> layers;
  std::uint64_t seed = 0;

  Index in_dim() const { return layers.empty() ? 0 : layers.front().weight.rows(); }
  Index out_dim() const { return layers.empty() ? 0 : layers.back().weight.cols(); }
  /// Throws ConfigError if consecutive layers do not chain.
  void validate() const;
};

struct MlpSpec {
  Index in = 0;
  std::vector<Index> hidden;
  Index out = 0;
};

/// Xavier-uniform weights, zero biases; a pure function of (seed, spec).
Mlp init_params(std::uint64_t seed, const MlpSpec& spec);

/// Parameters of an Mlp registered on a tape as gradient-carrying variables.
struct BoundMlp {
  std::vector<Var> weights;
  std::vector<Var> biases;
};

/// trainable == false records the parameters as constants.
BoundMlp bind(Tape& tape, const Mlp& net, bool trainable = true);
/// Copies the gradients of a bound network into an Mlp-shaped structure.
Mlp collect_grads(const Tape& tape, const BoundMlp& bound, const Mlp& like);

/// Recorded forward pass for x (rows × in).
Var mlp_forward(Tape& tape, const BoundMlp& net, Var x);
/// Tape-free evaluation.
RealArray mlp_forward(const Mlp& net, const RealArray& x);

/// Row-major flattening used by the JSON checkpoints.
std::vector<double> to_row_major(const RealArray& a);
RealArray from_row_major(const std::vector<double>& values, Index rows, Index cols);

nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& doc);

}  // namespace tnp::nn
