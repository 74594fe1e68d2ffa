#include "tnp/tasks/families.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "tnp/errors.hpp"
#include "tnp/rng.hpp"
#include "tnp/tasks/gp_sampler.hpp"

namespace tnp::tasks {

namespace {

constexpr double kBraninMin = 0.397887357729738;
// Branin maximum over the standard domain minus its minimum; brings the
// negated function into [0, 1].
constexpr double kBraninRange = 307.73;
constexpr std::size_t kBraninGrid = 1001;

}  // namespace

BlackBoxTask quad_family(std::uint64_t member_seed, std::size_t dim) {
  if (dim == 0) throw ConfigError("quad family: dimension must be at least 1");
  Rng rng(member_seed);
  std::vector<double> c(dim);
  for (double& v : c) v = rng.uniform(0.3, 0.7);
  const double inv_dim = 1.0 / static_cast<double>(dim);
  BlackBoxTask task("quad-" + std::to_string(member_seed), dim,
                    [c, inv_dim](std::span<const double> x) {
                      double sq = 0.0;
                      for (std::size_t i = 0; i < c.size(); ++i) sq += (x[i] - c[i]) * (x[i] - c[i]);
                      return 1.0 - sq * inv_dim;
                    });
  task.set_optimum({1.0, c});
  return task;
}

double branin(double x1, double x2) {
  constexpr double pi = std::numbers::pi;
  constexpr double b = 5.1 / (4.0 * pi * pi);
  constexpr double c = 5.0 / pi;
  constexpr double t = 1.0 / (8.0 * pi);
  const double q = x2 - b * x1 * x1 + c * x1 - 6.0;
  return q * q + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

BlackBoxTask branin_task(double shift_x1, double shift_x2, std::string id) {
  auto f = [shift_x1, shift_x2](double u1, double u2) {
    const double x1 = -5.0 + 15.0 * (u1 - shift_x1);
    const double x2 = 15.0 * (u2 - shift_x2);
    return 1.0 - (branin(x1, x2) - kBraninMin) / kBraninRange;
  };
  KnownOptimum best{-std::numeric_limits<double>::infinity(), {0.0, 0.0}};
  const double step = 1.0 / static_cast<double>(kBraninGrid - 1);
  for (std::size_t i = 0; i < kBraninGrid; ++i) {
    for (std::size_t j = 0; j < kBraninGrid; ++j) {
      const double u1 = static_cast<double>(i) * step;
      const double u2 = static_cast<double>(j) * step;
      const double v = f(u1, u2);
      if (v > best.value) best = {v, {u1, u2}};
    }
  }
  BlackBoxTask task(std::move(id), 2, [f](std::span<const double> x) { return f(x[0], x[1]); });
  task.set_optimum(std::move(best));
  return task;
}

BlackBoxTask branin_family(std::uint64_t member_seed) {
  Rng rng(member_seed);
  const double s1 = rng.uniform(-0.1, 0.1);
  const double s2 = rng.uniform(-0.1, 0.1);
  return branin_task(s1, s2, "branin-" + std::to_string(member_seed));
}

FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "gp") return FamilyKind::kGp;
  if (name == "branin" || name == "branin-shift") return FamilyKind::kBranin;
  if (name == "quad" || name == "quad-shift") return FamilyKind::kQuad;
  if (name == "tabular") return FamilyKind::kTabular;
  throw ConfigError("unknown task family '" + name + "'");
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kGp: return "gp";
    case FamilyKind::kBranin: return "branin";
    case FamilyKind::kQuad: return "quad";
    case FamilyKind::kTabular: return "tabular";
  }
  return "unknown";
}

void FamilySpec::validate() const {
  if (kind == FamilyKind::kTabular && tabular_files.empty()) {
    throw ConfigError("tabular family needs at least one file");
  }
  if ((kind == FamilyKind::kQuad || kind == FamilyKind::kGp) && dim == 0) {
    throw ConfigError("family dimension must be at least 1");
  }
  if (kind == FamilyKind::kGp &&
      !(gp_length_scale_min > 0.0 && gp_length_scale_min <= gp_length_scale_max)) {
    throw ConfigError("gp family: invalid length-scale range");
  }
}

BlackBoxTask make_member(const FamilySpec& spec, std::size_t m) {
  spec.validate();
  const std::uint64_t member_seed = mix_seed(spec.seed, m);
  switch (spec.kind) {
    case FamilyKind::kQuad: return quad_family(member_seed, spec.dim);
    case FamilyKind::kBranin: return branin_family(member_seed);
    case FamilyKind::kGp: {
      Rng rng(member_seed);
      GpSampleSpec gs;
      gs.dim = spec.dim;
      gs.length_scale = rng.uniform(spec.gp_length_scale_min, spec.gp_length_scale_max);
      return sample_gp_function(gs, rng, "gp-" + std::to_string(member_seed));
    }
    case FamilyKind::kTabular:
      return load_tabular_task(spec.tabular_files[m % spec.tabular_files.size()]);
  }
  throw ConfigError("unhandled task family");
}

}  // namespace tnp::tasks
