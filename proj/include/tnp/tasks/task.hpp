#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tnp/nn/real_array.hpp"

namespace tnp::tasks {

struct KnownOptimum {
  double value = 0.0;
  std::vector<double> location;
};

/// A maximization target over [0,1]^d.
class BlackBoxTask {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;

  BlackBoxTask() = default;
  BlackBoxTask(std::string id, std::size_t dim, Evaluator evaluator);

  const std::string& id() const noexcept { return id_; }
  std::size_t dim() const noexcept { return dim_; }

  /// Noise-free value plus, when noise_stddev > 0, Gaussian noise that is a
  /// deterministic function of (x, noise seed).
  double evaluate(std::span<const double> x) const;

  const std::optional<KnownOptimum>& optimum() const noexcept { return optimum_; }
  void set_optimum(KnownOptimum opt) { optimum_ = std::move(opt); }

  double noise_stddev() const noexcept { return noise_stddev_; }
  void set_noise(double stddev, std::uint64_t seed);

  /// Tasks backed by a finite table restrict proposals to these rows.
  const std::optional<nn::RealArray>& candidates() const noexcept { return candidates_; }
  void set_candidates(nn::RealArray c) { candidates_ = std::move(c); }

 private:
  std::string id_;
  std::size_t dim_ = 0;
  Evaluator evaluator_;
  std::optional<KnownOptimum> optimum_;
  double noise_stddev_ = 0.0;
  std::uint64_t noise_seed_ = 0;
  std::optional<nn::RealArray> candidates_;
};

}  // namespace tnp::tasks
