#include "tnp/smbo/gp_surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>

#include "tnp/errors.hpp"

namespace tnp::smbo {

double matern52(double distance, double length_scale) {
  const double a = std::sqrt(5.0) * distance / length_scale;
  return (1.0 + a + a * a / 3.0) * std::exp(-a);
}

namespace {

RealArray cross_kernel(const RealArray& a, const RealArray& b, double length_scale) {
  RealArray k(a.rows(), b.rows());
  for (nn::Index i = 0; i < a.rows(); ++i) {
    for (nn::Index j = 0; j < b.rows(); ++j) {
      k(i, j) = matern52((a.row(i) - b.row(j)).norm(), length_scale);
    }
  }
  return k;
}

}  // namespace

GpFit fit_gp_fixed(const RealArray& x, const Eigen::VectorXd& y, double length_scale, double noise) {
  if (x.rows() == 0) throw ContractError("fit_gp: empty history");
  if (x.rows() != y.size()) throw ContractError("fit_gp: x and y lengths differ");
  if (!(noise > 0.0)) throw ConfigError("fit_gp: noise must be positive");
  GpFit fit;
  fit.x = x;
  fit.y = y;
  fit.length_scale = length_scale;
  fit.noise = noise;
  const RealArray k = cross_kernel(x, x, length_scale);
  // Diagonal grows ×10 from the noise level up to 1e-2.
  const double top = std::max(noise, 1e-2) * (1.0 + 1e-9);
  for (double diag = noise; diag <= top; diag *= 10.0) {
    const double jitter = diag - noise;
    RealArray shifted = k;
    shifted.diagonal().array() += diag;
    Eigen::LLT<RealArray> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    fit.chol = llt.matrixL();
    if (!fit.chol.allFinite()) continue;
    fit.jitter = jitter;
    fit.alpha = llt.solve(y);
    const double n = static_cast<double>(y.size());
    fit.log_marginal = -0.5 * y.dot(fit.alpha) - fit.chol.diagonal().array().log().sum() -
                       0.5 * n * std::log(2.0 * std::numbers::pi);
    return fit;
  }
  throw NumericError("fit_gp: Gram matrix not positive definite with jitter up to 1e-2");
}

GpFit fit_gp(const RealArray& x, const Eigen::VectorXd& y, double noise,
             std::span<const double> length_scales) {
  if (length_scales.empty()) throw ConfigError("fit_gp: empty length-scale grid");
  GpFit best;
  double best_lml = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (const double ls : length_scales) {
    GpFit fit = fit_gp_fixed(x, y, ls, noise);
    if (!found || fit.log_marginal > best_lml) {
      best_lml = fit.log_marginal;
      best = std::move(fit);
      found = true;
    }
  }
  return best;
}

std::vector<np::GaussianPrediction> gp_predict(const GpFit& fit, const RealArray& candidates) {
  const RealArray ks = cross_kernel(candidates, fit.x, fit.length_scale);  // m × n
  const Eigen::VectorXd mean = ks * fit.alpha;
  const RealArray v = fit.chol.triangularView<Eigen::Lower>().solve(ks.transpose());  // n × m
  std::vector<np::GaussianPrediction> out(static_cast<std::size_t>(candidates.rows()));
  for (nn::Index i = 0; i < candidates.rows(); ++i) {
    const double var = std::max(1.0 - v.col(i).squaredNorm(), 0.0);
    out[static_cast<std::size_t>(i)] = {mean(i), std::sqrt(var)};
  }
  return out;
}

std::vector<np::GaussianPrediction> gp_surrogate_predict(const np::HistorySet& history,
                                                         const RealArray& candidates) {
  if (history.empty()) throw ContractError("gp_surrogate_predict: empty history");
  const RealArray y = history.y_column();
  return gp_predict(fit_gp(history.x_matrix(), y.col(0)), candidates);
}

}  // namespace tnp::smbo
