#include "tnp/tasks/task.hpp"

#include <bit>
#include <string>

#include "tnp/errors.hpp"
#include "tnp/rng.hpp"

namespace tnp::tasks {

BlackBoxTask::BlackBoxTask(std::string id, std::size_t dim, Evaluator evaluator)
    : id_(std::move(id)), dim_(dim), evaluator_(std::move(evaluator)) {
  if (dim_ == 0) throw ConfigError("task " + id_ + ": dimension must be at least 1");
  if (!evaluator_) throw ConfigError("task " + id_ + ": missing evaluator");
}

double BlackBoxTask::evaluate(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw ConfigError("task " + id_ + ": expected " + std::to_string(dim_) + " coordinates, got " +
                      std::to_string(x.size()));
  }
  double value = evaluator_(x);
  if (noise_stddev_ > 0.0) {
    std::uint64_t key = noise_seed_;
    for (double v : x) key = mix_seed(key, std::bit_cast<std::uint64_t>(v));
    Rng rng(key);
    value += noise_stddev_ * rng.normal();
  }
  return value;
}

void BlackBoxTask::set_noise(double stddev, std::uint64_t seed) {
  if (stddev < 0.0) throw ConfigError("task " + id_ + ": noise stddev must be non-negative");
  noise_stddev_ = stddev;
  noise_seed_ = seed;
}

}  // namespace tnp::tasks
