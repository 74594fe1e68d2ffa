#include "tnp/tasks/gp_sampler.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "tnp/errors.hpp"

namespace tnp::tasks {

std::size_t GpSampleSpec::points_per_axis() const {
  if (grid_points != 0) return grid_points;
  if (dim == 1) return 256;
  if (dim == 2) return 64;
  return 16;
}

void GpSampleSpec::validate() const {
  if (!(length_scale > 0.0)) throw ConfigError("gp spec: length scale must be positive");
  if (!(kernel_scale > 0.0)) throw ConfigError("gp spec: kernel scale must be positive");
  if (dim < 1) throw ConfigError("gp spec: dimension must be at least 1");
  if (points_per_axis() < 2) throw ContractError("gp spec: need at least two grid points");
}

double se_kernel(std::span<const double> a, std::span<const double> b, double length_scale,
                 double kernel_scale) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return kernel_scale * kernel_scale * std::exp(-0.5 * sq / (length_scale * length_scale));
}

RealArray cholesky_with_jitter(const RealArray& k, double initial_jitter, double max_jitter) {
  const nn::Index n = k.rows();
  for (double jitter = initial_jitter; jitter <= max_jitter * (1.0 + 1e-9); jitter *= 10.0) {
    RealArray shifted = k;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<RealArray> llt(shifted);
    if (llt.info() == Eigen::Success) {
      RealArray l = llt.matrixL();
      if (l.allFinite()) return l;
    }
  }
  throw NumericError("Cholesky failed after jitter escalation to " + std::to_string(max_jitter) +
                     " (n=" + std::to_string(n) + ")");
}

Eigen::VectorXd sample_gp_values(const RealArray& x, double length_scale, double kernel_scale,
                                 Rng& rng) {
  const nn::Index n = x.rows();
  RealArray k(n, n);
  for (nn::Index i = 0; i < n; ++i) {
    for (nn::Index j = 0; j <= i; ++j) {
      double sq = (x.row(i) - x.row(j)).squaredNorm();
      k(i, j) = k(j, i) = kernel_scale * kernel_scale *
                          std::exp(-0.5 * sq / (length_scale * length_scale));
    }
  }
  const RealArray l = cholesky_with_jitter(k);
  Eigen::VectorXd z(n);
  for (nn::Index i = 0; i < n; ++i) z(i) = rng.normal();
  return l * z;
}

GridFunction::GridFunction(std::size_t dim, std::size_t points_per_axis, std::vector<double> values)
    : dim_(dim), n_(points_per_axis), values_(std::move(values)) {
  std::size_t expected = 1;
  for (std::size_t a = 0; a < dim_; ++a) expected *= n_;
  if (n_ < 2 || values_.size() != expected) throw ConfigError("grid function: size mismatch");
}

double GridFunction::operator()(std::span<const double> x) const {
  std::vector<std::size_t> base(dim_);
  std::vector<double> frac(dim_);
  const double top = static_cast<double>(n_ - 1);
  for (std::size_t a = 0; a < dim_; ++a) {
    const double p = std::clamp(x[a], 0.0, 1.0) * top;
    const std::size_t i = std::min(static_cast<std::size_t>(p), n_ - 2);
    base[a] = i;
    frac[a] = p - static_cast<double>(i);
  }
  double total = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << dim_); ++corner) {
    double weight = 1.0;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < dim_; ++a) {
      const bool upper = (corner >> a) & 1U;
      weight *= upper ? frac[a] : 1.0 - frac[a];
      flat = flat * n_ + base[a] + (upper ? 1 : 0);
    }
    if (weight != 0.0) total += weight * values_[flat];
  }
  return total;
}

std::vector<double> GridFunction::location(std::size_t flat) const {
  std::vector<double> x(dim_);
  for (std::size_t a = dim_; a-- > 0;) {
    x[a] = static_cast<double>(flat % n_) / static_cast<double>(n_ - 1);
    flat /= n_;
  }
  return x;
}

GpFunctionSampler::GpFunctionSampler(GpSampleSpec spec) : spec_(spec) {
  spec_.validate();
  const std::size_t n = spec_.points_per_axis();
  RealArray k(static_cast<nn::Index>(n), static_cast<nn::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = (static_cast<double>(i) - static_cast<double>(j)) / static_cast<double>(n - 1);
      k(static_cast<nn::Index>(i), static_cast<nn::Index>(j)) =
          std::exp(-0.5 * d * d / (spec_.length_scale * spec_.length_scale));
    }
  }
  axis_factor_ = cholesky_with_jitter(k);
}

GridFunction GpFunctionSampler::draw(Rng& rng) const {
  const std::size_t n = spec_.points_per_axis();
  std::size_t total = 1;
  for (std::size_t a = 0; a < spec_.dim; ++a) total *= n;
  std::vector<double> values(total);
  for (double& v : values) v = rng.normal();

  // Mode product with the axis factor along every axis.
  Eigen::VectorXd fiber(static_cast<nn::Index>(n));
  for (std::size_t a = 0; a < spec_.dim; ++a) {
    std::size_t stride = 1;
    for (std::size_t b = a + 1; b < spec_.dim; ++b) stride *= n;
    const std::size_t block = stride * n;
    for (std::size_t start = 0; start < total; start += block) {
      for (std::size_t offset = 0; offset < stride; ++offset) {
        for (std::size_t i = 0; i < n; ++i) {
          fiber(static_cast<nn::Index>(i)) = values[start + offset + i * stride];
        }
        const Eigen::VectorXd mixed = axis_factor_.triangularView<Eigen::Lower>() * fiber;
        for (std::size_t i = 0; i < n; ++i) {
          values[start + offset + i * stride] = mixed(static_cast<nn::Index>(i));
        }
      }
    }
  }
  for (double& v : values) v *= spec_.kernel_scale;
  return GridFunction(spec_.dim, n, std::move(values));
}

BlackBoxTask make_grid_task(GridFunction f, std::string id) {
  const auto& v = f.values();
  const std::size_t best = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  KnownOptimum opt{v[best], f.location(best)};
  const std::size_t dim = f.dim();
  BlackBoxTask task(std::move(id), dim,
                    [f = std::move(f)](std::span<const double> x) { return f(x); });
  task.set_optimum(std::move(opt));
  return task;
}

BlackBoxTask sample_gp_function(const GpSampleSpec& spec, Rng& rng, std::string id) {
  GpFunctionSampler sampler(spec);
  return make_grid_task(sampler.draw(rng), std::move(id));
}

}  // namespace tnp::tasks
