#pragma once

#include <Eigen/Dense>

namespace tnp::nn {

/// Dense 2-D array of 64-bit reals. Vectors are stored as 1×n rows.
using RealArray = Eigen::MatrixXd;
using Index = Eigen::Index;

inline bool all_finite(const RealArray& a) { return a.allFinite(); }

}  // namespace tnp::nn
