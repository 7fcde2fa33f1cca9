#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "splitreg/errors.hpp"

namespace splitreg {

/// A regression data set. Throughout the library "standardized" means every
/// design column has mean 0 and second moment (1/n)*sum(x_ij^2) equal to 1.
/// All variances and covariances use the 1/n convention, not 1/(n-1).
struct Dataset {
  Eigen::MatrixXd x;  // n x d design
  Eigen::VectorXd y;  // n responses
  bool standardized = false;

  int n() const { return static_cast<int>(x.rows()); }
  int d() const { return static_cast<int>(x.cols()); }
};

struct StandardizeResult {
  Dataset data;           // standardized copy
  Eigen::VectorXd center; // per-column mean removed
  Eigen::VectorXd scale;  // per-column root mean square divided out
};

/// Centers and rescales every design column to mean 0, second moment 1.
/// Requires n >= 2 and matching x/y lengths. A column whose centered second
/// moment is <= 1e-12 cannot be standardized and raises DegenerateColumnError.
inline StandardizeResult standardize(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  if (n < 2) throw ParameterError("standardize: need at least 2 rows");
  if (y.size() != n) throw ParameterError("standardize: x and y row counts differ");
  StandardizeResult out;
  out.center.resize(d);
  out.scale.resize(d);
  Eigen::MatrixXd z = x;
  for (int j = 0; j < d; ++j) {
    double mean = z.col(j).mean();
    double ms = (z.col(j).array() - mean).square().mean();
    if (ms <= 1e-12)
      throw DegenerateColumnError(
          j, "standardize: column " + std::to_string(j + 1) + " is (numerically) constant");
    double scale = std::sqrt(ms);
    out.center[j] = mean;
    out.scale[j] = scale;
    if (mean != 0.0) z.col(j).array() -= mean;
    if (scale != 1.0) z.col(j) /= scale;
  }
  out.data = Dataset{std::move(z), y, true};
  return out;
}

/// Empirical covariance with the 1/n convention: (1/n) * Xc' * Xc after
/// removing column means.
inline Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  if (n < 1) throw ParameterError("empirical_covariance: empty matrix");
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  return (centered.transpose() * centered) / static_cast<double>(n);
}

}  // namespace splitreg
