#include "tnp/smbo/candidates.hpp"

#include <vector>

#include <boost/random/sobol.hpp>

#include "tnp/errors.hpp"
#include "tnp/rng.hpp"

namespace tnp::smbo {

nn::RealArray make_candidates(std::size_t d, std::size_t n, std::uint64_t seed) {
  if (d == 0 || n == 0) throw ConfigError("make_candidates: d and n must be positive");
  boost::random::sobol_engine<std::uint32_t, 32> engine(d);
  Rng rng(seed);
  std::vector<std::uint32_t> shift(d);
  for (auto& s : shift) s = static_cast<std::uint32_t>(rng.next_u64() >> 32);
  constexpr double kScale = 1.0 / 4294967296.0;
  nn::RealArray out(static_cast<nn::Index>(n), static_cast<nn::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out(static_cast<nn::Index>(i), static_cast<nn::Index>(j)) =
          static_cast<double>(engine() ^ shift[j]) * kScale;
    }
  }
  return out;
}

}  // namespace tnp::smbo
