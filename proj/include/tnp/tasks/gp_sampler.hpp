#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tnp/nn/real_array.hpp"
#include "tnp/rng.hpp"
#include "tnp/tasks/task.hpp"

namespace tnp::tasks {

using nn::RealArray;

/// Squared-exponential GP prior on [0,1]^d evaluated on a regular grid.
struct GpSampleSpec {
  double length_scale = 0.5;
  double kernel_scale = 1.0;
  std::size_t dim = 1;
  /// Grid points per axis; 0 selects 256 (d=1), 64 (d=2) or 16 (d>2).
  std::size_t grid_points = 0;

  std::size_t points_per_axis() const;
  void validate() const;
};

double se_kernel(std::span<const double> a, std::span<const double> b, double length_scale,
                 double kernel_scale);

/// Lower Cholesky factor of k + jitter·I, escalating jitter ×10 from
/// initial_jitter up to max_jitter. Throws NumericError if all attempts fail.
RealArray cholesky_with_jitter(const RealArray& k, double initial_jitter = 1e-8,
                               double max_jitter = 1e-4);

/// Joint prior draw at arbitrary rows of x (n × d).
Eigen::VectorXd sample_gp_values(const RealArray& x, double length_scale, double kernel_scale,
                                 Rng& rng);

/// Function values on the grid, linearly interpolated between grid points.
class GridFunction {
 public:
  GridFunction(std::size_t dim, std::size_t points_per_axis, std::vector<double> values);

  double operator()(std::span<const double> x) const;
  std::size_t dim() const noexcept { return dim_; }
  std::size_t points_per_axis() const noexcept { return n_; }
  const std::vector<double>& values() const noexcept { return values_; }
  /// Grid coordinate of a flat index (first axis varies slowest).
  std::vector<double> location(std::size_t flat) const;

 private:
  std::size_t dim_;
  std::size_t n_;
  std::vector<double> values_;
};

/// Caches the per-axis Cholesky factor of one spec. The SE kernel on a
/// Cartesian grid is a Kronecker product of 1-D kernels, so a draw is
/// L ⊗ ... ⊗ L applied to white noise.
class GpFunctionSampler {
 public:
  explicit GpFunctionSampler(GpSampleSpec spec);
  GridFunction draw(Rng& rng) const;
  const GpSampleSpec& spec() const noexcept { return spec_; }

 private:
  GpSampleSpec spec_;
  RealArray axis_factor_;
};

/// Grid-interpolated prior draw; the stored optimum is the grid maximum,
/// which is also the maximum of the interpolant.
BlackBoxTask sample_gp_function(const GpSampleSpec& spec, Rng& rng, std::string id = "gp");
BlackBoxTask make_grid_task(GridFunction f, std::string id);

}  // namespace tnp::tasks
