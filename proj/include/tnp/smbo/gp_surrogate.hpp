#pragma once

#include <span>
#include <vector>

#include "tnp/np/history.hpp"
#include "tnp/np/model.hpp"

namespace tnp::smbo {

using nn::RealArray;

double matern52(double distance, double length_scale);

/// Exact GP posterior with a unit-amplitude Matérn-5/2 kernel and zero mean.
struct GpFit {
  RealArray x;             // n × d
  Eigen::VectorXd y;       // n
  double length_scale = 0.0;
  double noise = 1e-6;
  double jitter = 0.0;     // extra diagonal added for a stable factorization
  RealArray chol;          // lower factor of K + (noise + jitter) I
  Eigen::VectorXd alpha;   // (K + σ²I)^{-1} y
  double log_marginal = 0.0;
};

inline constexpr double kDefaultLengthScales[] = {0.1, 0.2, 0.5, 1.0};

/// Fits every length scale on the grid and keeps the largest marginal
/// likelihood (first on ties). A non-PD Gram matrix has its diagonal
/// raised ×10 at a time up to 1e-2, then NumericError.
GpFit fit_gp(const RealArray& x, const Eigen::VectorXd& y, double noise = 1e-6,
             std::span<const double> length_scales = kDefaultLengthScales);
GpFit fit_gp_fixed(const RealArray& x, const Eigen::VectorXd& y, double length_scale, double noise);

std::vector<np::GaussianPrediction> gp_predict(const GpFit& fit, const RealArray& candidates);

/// fit_gp on the history followed by gp_predict; y is used as given.
std::vector<np::GaussianPrediction> gp_surrogate_predict(const np::HistorySet& history,
                                                         const RealArray& candidates);

}  // namespace tnp::smbo
