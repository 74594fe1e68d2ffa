#include "tnp/np/np_params.hpp"

#include <cmath>
#include <fstream>

#include "tnp/errors.hpp"
#include "tnp/rng.hpp"

namespace tnp::np {

AttentionScale attention_scale_from_string(const std::string& name) {
  if (name == "sqrt_r") return AttentionScale::kSqrtR;
  if (name == "sqrt_dh") return AttentionScale::kSqrtDh;
  throw ConfigError("unknown attention_scale '" + name + "' (expected sqrt_r or sqrt_dh)");
}

std::string to_string(AttentionScale s) {
  return s == AttentionScale::kSqrtR ? "sqrt_r" : "sqrt_dh";
}

void NpConfig::validate() const {
  if (d < 1) throw ConfigError("np config: d must be at least 1");
  if (r < 1 || heads < 1) throw ConfigError("np config: r and heads must be positive");
  if (r % heads != 0) throw ConfigError("np config: r must be divisible by the head count");
  for (Index h : hidden) {
    if (h < 1) throw ConfigError("np config: hidden widths must be positive");
  }
  if (!(sigma_floor > 0.0)) throw ConfigError("np config: sigma floor must be positive");
}

std::vector<RealArray*> NpParams::tensors() {
  std::vector<RealArray*> out;
  for (nn::Mlp* net : {&encoder, &key_net, &decoder}) {
    for (auto& l : net->layers) {
      out.push_back(&l.weight);
      out.push_back(&l.bias);
    }
  }
  for (auto& h : heads) {
    out.push_back(&h.wq);
    out.push_back(&h.wk);
    out.push_back(&h.wv);
  }
  return out;
}

std::vector<const RealArray*> NpParams::tensors() const {
  auto mutable_view = const_cast<NpParams*>(this)->tensors();
  return {mutable_view.begin(), mutable_view.end()};
}

std::vector<ParamGroup> NpParams::tensor_groups() const {
  std::vector<ParamGroup> out;
  out.insert(out.end(), encoder.layers.size() * 2, ParamGroup::kEncoder);
  out.insert(out.end(), key_net.layers.size() * 2, ParamGroup::kAttention);
  out.insert(out.end(), decoder.layers.size() * 2, ParamGroup::kDecoder);
  out.insert(out.end(), heads.size() * 3, ParamGroup::kAttention);
  return out;
}

std::size_t NpParams::parameter_count() const {
  std::size_t n = 0;
  for (const RealArray* t : tensors()) n += static_cast<std::size_t>(t->size());
  return n;
}

Eigen::VectorXd NpParams::flatten() const {
  Eigen::VectorXd flat(static_cast<Index>(parameter_count()));
  Index offset = 0;
  for (const RealArray* t : tensors()) {
    flat.segment(offset, t->size()) = Eigen::Map<const Eigen::VectorXd>(t->data(), t->size());
    offset += t->size();
  }
  return flat;
}

void NpParams::assign(const Eigen::VectorXd& flat) {
  if (flat.size() != static_cast<Index>(parameter_count())) {
    throw ConfigError("np params: flat vector has the wrong length");
  }
  Index offset = 0;
  for (RealArray* t : tensors()) {
    Eigen::Map<Eigen::VectorXd>(t->data(), t->size()) = flat.segment(offset, t->size());
    offset += t->size();
  }
}

NpParams NpParams::zeros_like() const {
  NpParams z = *this;
  for (RealArray* t : z.tensors()) t->setZero();
  return z;
}

bool NpParams::all_finite() const {
  for (const RealArray* t : tensors()) {
    if (!t->allFinite()) return false;
  }
  return true;
}

void NpParams::validate() const {
  config.validate();
  encoder.validate();
  key_net.validate();
  decoder.validate();
  const Index d = config.d;
  const Index r = config.r;
  if (encoder.in_dim() != d + 1 || encoder.out_dim() != r) {
    throw ConfigError("np params: encoder must map d+1 -> r");
  }
  if (key_net.in_dim() != d || key_net.out_dim() != r) {
    throw ConfigError("np params: key net must map d -> r");
  }
  if (decoder.in_dim() != r + d || decoder.out_dim() != 2) {
    throw ConfigError("np params: decoder must map r+d -> 2");
  }
  if (static_cast<Index>(heads.size()) != config.heads) {
    throw ConfigError("np params: head count does not match config");
  }
  for (const auto& h : heads) {
    for (const RealArray* w : {&h.wq, &h.wk, &h.wv}) {
      if (w->rows() != r || w->cols() != config.head_dim()) {
        throw ConfigError("np params: head projections must be r x d_h");
      }
    }
  }
}

NpParams init_np_params(const NpConfig& config, std::uint64_t seed) {
  config.validate();
  NpParams p;
  p.config = config;
  p.encoder = nn::init_params(mix_seed(seed, 1), {config.d + 1, config.hidden, config.r});
  p.key_net = nn::init_params(mix_seed(seed, 2), {config.d, config.hidden, config.r});
  p.decoder = nn::init_params(mix_seed(seed, 3), {config.r + config.d, config.hidden, 2});
  Rng rng(mix_seed(seed, 4));
  const Index dh = config.head_dim();
  const double limit = std::sqrt(6.0 / static_cast<double>(config.r + dh));
  auto draw = [&] {
    RealArray w(config.r, dh);
    for (Index i = 0; i < w.rows(); ++i) {
      for (Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-limit, limit);
    }
    return w;
  };
  for (Index h = 0; h < config.heads; ++h) {
    AttentionHead head;
    head.wq = draw();
    head.wk = draw();
    head.wv = draw();
    p.heads.push_back(std::move(head));
  }
  return p;
}

nlohmann::json to_json(const NpParams& p) {
  nlohmann::json heads = nlohmann::json::array();
  for (const auto& h : p.heads) {
    heads.push_back({{"wq", nn::to_row_major(h.wq)},
                     {"wk", nn::to_row_major(h.wk)},
                     {"wv", nn::to_row_major(h.wv)}});
  }
  return {{"encoder", nn::to_json(p.encoder)},
          {"key_net", nn::to_json(p.key_net)},
          {"decoder", nn::to_json(p.decoder)},
          {"heads", heads},
          {"r", p.config.r},
          {"H", p.config.heads},
          {"d", p.config.d},
          {"hidden", p.config.hidden},
          {"attention_scale", to_string(p.config.attention_scale)},
          {"sigma_floor", p.config.sigma_floor}};
}

NpParams np_params_from_json(const nlohmann::json& doc) {
  NpParams p;
  p.config.r = doc.at("r").get<Index>();
  p.config.heads = doc.at("H").get<Index>();
  p.config.d = doc.at("d").get<Index>();
  p.config.hidden = doc.value("hidden", std::vector<Index>{128, 128});
  p.config.attention_scale =
      attention_scale_from_string(doc.value("attention_scale", std::string("sqrt_r")));
  p.config.sigma_floor = doc.value("sigma_floor", 1e-3);
  p.config.validate();
  p.encoder = nn::mlp_from_json(doc.at("encoder"));
  p.key_net = nn::mlp_from_json(doc.at("key_net"));
  p.decoder = nn::mlp_from_json(doc.at("decoder"));
  const Index dh = p.config.head_dim();
  for (const auto& h : doc.at("heads")) {
    p.heads.push_back({nn::from_row_major(h.at("wq").get<std::vector<double>>(), p.config.r, dh),
                       nn::from_row_major(h.at("wk").get<std::vector<double>>(), p.config.r, dh),
                       nn::from_row_major(h.at("wv").get<std::vector<double>>(), p.config.r, dh)});
  }
  p.validate();
  return p;
}

void save_np_params(const NpParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint " + path);
  out << to_json(p).dump() << '\n';
}

NpParams load_np_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read checkpoint " + path);
  return np_params_from_json(nlohmann::json::parse(in));
}

}  // namespace tnp::np
