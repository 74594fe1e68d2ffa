#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace tnp {

/// Mixes two 64-bit words into a well-distributed seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

/// SplitMix64 generator with portable uniform/normal draws.
///
/// Distributions are implemented here rather than through <random> so a
/// given seed produces the same stream with every standard library.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept;
  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) noexcept;
  /// Uniform integer in [lo, hi].
  std::size_t uniform_int(std::size_t lo, std::size_t hi) noexcept {
    return lo + uniform_index(hi - lo + 1);
  }
  /// Standard normal via Box-Muller.
  double normal() noexcept;

  /// Independent child stream; does not advance this generator.
  Rng split(std::uint64_t stream) const noexcept { return Rng(mix_seed(state_, stream)); }

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::uint64_t state_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tnp
