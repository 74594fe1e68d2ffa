#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tnp::nn {

struct GradCheckReport {
  bool passed = true;
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::vector<double> relative_errors;
};

/// Compares an analytic gradient with central differences of step h.
///
/// Relative error per coordinate is |a - n| / max(|a|, |n|, abs_floor); the
/// floor keeps coordinates whose true derivative is ~0 from reporting noise.
GradCheckReport finite_diff_check(const std::function<double(std::span<const double>)>& loss,
                                  std::span<const double> params,
                                  std::span<const double> analytic_grad, double h, double tol,
                                  double abs_floor = 1e-6);

}  // namespace tnp::nn
