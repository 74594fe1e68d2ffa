#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "tnp/nn/mlp.hpp"

namespace tnp::np {

using nn::Index;
using nn::RealArray;

/// Divisor applied to attention logits: √r as printed, or √d_h.
enum class AttentionScale { kSqrtR, kSqrtDh };

AttentionScale attention_scale_from_string(const std::string& name);
std::string to_string(AttentionScale s);

struct NpConfig {
  Index d = 1;        // configuration dimension
  Index r = 128;      // embedding dimension
  Index heads = 4;    // d_h = r / heads
  std::vector<Index> hidden{128, 128};
  AttentionScale attention_scale = AttentionScale::kSqrtR;
  double sigma_floor = 1e-3;

  Index head_dim() const { return r / heads; }
  void validate() const;
};

struct AttentionHead {
  RealArray wq;  // r × d_h
  RealArray wk;
  RealArray wv;
};

/// Which part of θ = θ_e ∪ θ_a ∪ θ_d a tensor belongs to.
enum class ParamGroup { kEncoder, kAttention, kDecoder };

/// All learnable parameters of the neural-process surrogate.
struct NpParams {
  NpConfig config;
  nn::Mlp encoder;  // (d+1) -> hidden -> r
  nn::Mlp key_net;  // d -> hidden -> r
  nn::Mlp decoder;  // (r+d) -> hidden -> 2
  std::vector<AttentionHead> heads;

  /// Every tensor in a fixed canonical order.
  std::vector<RealArray*> tensors();
  std::vector<const RealArray*> tensors() const;
  /// Group of each tensor, aligned with tensors().
  std::vector<ParamGroup> tensor_groups() const;
  std::size_t parameter_count() const;

  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
  NpParams zeros_like() const;
  bool all_finite() const;
  void validate() const;
};

NpParams init_np_params(const NpConfig& config, std::uint64_t seed);

nlohmann::json to_json(const NpParams& p);
NpParams np_params_from_json(const nlohmann::json& doc);
void save_np_params(const NpParams& p, const std::string& path);
NpParams load_np_params(const std::string& path);

}  // namespace tnp::np
