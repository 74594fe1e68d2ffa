#include "tnp/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "tnp/errors.hpp"

namespace tnp::nn {

GradCheckReport finite_diff_check(const std::function<double(std::span<const double>)>& loss,
                                  std::span<const double> params,
                                  std::span<const double> analytic_grad, double h, double tol,
                                  double abs_floor) {
  if (h <= 0.0) throw ContractError("finite_diff_check: step must be positive");
  if (params.size() != analytic_grad.size()) {
    throw ContractError("finite_diff_check: gradient size differs from parameter size");
  }
  GradCheckReport report;
  report.relative_errors.resize(params.size());
  std::vector<double> probe(params.begin(), params.end());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double original = probe[i];
    probe[i] = original + h;
    const double up = loss(probe);
    probe[i] = original - h;
    const double down = loss(probe);
    probe[i] = original;

    const double numeric = (up - down) / (2.0 * h);
    const double analytic = analytic_grad[i];
    const double denom = std::max({std::abs(analytic), std::abs(numeric), abs_floor});
    const double rel = std::abs(analytic - numeric) / denom;
    report.relative_errors[i] = rel;
    if (!(rel <= report.max_relative_error)) {
      report.max_relative_error = rel;
      report.worst_index = i;
    }
    if (!(rel < tol)) report.passed = false;
  }
  return report;
}

}  // namespace tnp::nn
