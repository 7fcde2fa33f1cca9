#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>

#include "splitreg/dataset.hpp"
#include "splitreg/errors.hpp"
#include "splitreg/gram.hpp"
#include "splitreg/partition.hpp"

namespace splitreg {

struct LsTuning {};
struct RidgeTuning {
  double lambda = 0.0;
};
struct GarroteTuning {
  Eigen::VectorXd omega;  // per-coefficient shrinkage in [0,1]
};
struct SplitTuning {
  Partition partition;
  std::optional<Eigen::VectorXd> weights;  // per-coefficient shrinkage in [0,1]
};
struct EnetTuning {
  double lambda = 0.0;
  double alpha = 1.0;
};

using Tuning = std::variant<LsTuning, RidgeTuning, GarroteTuning, SplitTuning, EnetTuning>;

struct FitResult {
  Eigen::VectorXd coef;
  Tuning tuning;

  double predict(const Eigen::VectorXd& x0) const {
    if (x0.size() != coef.size()) throw ParameterError("predict: dimension mismatch");
    return x0.dot(coef);
  }
};

namespace detail {

inline void check_unit_interval(const Eigen::VectorXd& w, int d, const char* name) {
  if (w.size() != d)
    throw ParameterError(std::string(name) + ": weight length does not match design width");
  for (int j = 0; j < w.size(); ++j)
    if (!(w[j] >= 0.0 && w[j] <= 1.0))
      throw ParameterError(std::string(name) + ": weights must lie in [0,1]");
}

}  // namespace detail

/// Ordinary least squares on the full design: beta = (X'X)^-1 X'y.
inline FitResult fit_ls(const Dataset& ds) {
  Eigen::MatrixXd a = ds.x.transpose() * ds.x;
  Eigen::MatrixXd ainv = detail::sym_inverse_checked(a, "fit_ls");
  return FitResult{ainv * (ds.x.transpose() * ds.y), LsTuning{}};
}

/// Ridge: beta = (X'X + lambda I)^-1 X'y, lambda >= 0. lambda = 0 falls back to
/// least squares and therefore needs an invertible Gram matrix.
inline FitResult fit_ridge(const Dataset& ds, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("fit_ridge: lambda must be >= 0");
  Eigen::MatrixXd a = ds.x.transpose() * ds.x;
  a.diagonal().array() += lambda;
  Eigen::MatrixXd ainv = lambda > 0.0
                             ? Eigen::MatrixXd(a.ldlt().solve(Eigen::MatrixXd::Identity(ds.d(), ds.d())))
                             : detail::sym_inverse_checked(a, "fit_ridge");
  return FitResult{ainv * (ds.x.transpose() * ds.y), RidgeTuning{lambda}};
}

/// Simplified nonnegative-garrote estimator: componentwise shrinkage of the
/// least-squares coefficients, beta_j = omega_j * beta_ls_j with omega in [0,1]^d.
inline FitResult fit_garrote(const Dataset& ds, const Eigen::VectorXd& omega) {
  detail::check_unit_interval(omega, ds.d(), "fit_garrote");
  FitResult ls = fit_ls(ds);
  return FitResult{omega.cwiseProduct(ls.coef), GarroteTuning{omega}};
}

/// Split estimator: each group g of the partition is fit by least squares on
/// its own columns only, beta_g = (X_g'X_g)^-1 X_g'y; optional componentwise
/// shrinkage weights are applied afterwards. The partition must cover all columns.
inline FitResult fit_split(const Dataset& ds, const Partition& partition,
                           const std::optional<Eigen::VectorXd>& weights = std::nullopt) {
  if (!partition.covers(ds.d()))
    throw ParameterError("fit_split: partition must cover every design column exactly once");
  GramBlocks gb = gram_blocks(ds, partition);
  Eigen::VectorXd xty = ds.x.transpose() * ds.y;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(ds.d());
  for (std::size_t g = 0; g < gb.block_inverse.size(); ++g) {
    const auto& group = partition.groups()[g];
    const int k = static_cast<int>(group.size());
    Eigen::VectorXd rhs(k);
    for (int i = 0; i < k; ++i) rhs[i] = xty[group[i]];
    Eigen::VectorXd bg = gb.block_inverse[g] * rhs;
    for (int i = 0; i < k; ++i) coef[group[i]] = bg[i];
  }
  if (weights) {
    detail::check_unit_interval(*weights, ds.d(), "fit_split");
    coef = weights->cwiseProduct(coef);
  }
  return FitResult{std::move(coef), SplitTuning{partition, weights}};
}

/// A coefficient covariance matrix under the fixed-design homoskedastic model
/// y = X beta + eps, eps ~ (0, sigma2 I).
struct CovMatrix {
  Eigen::MatrixXd m;
  double sigma2 = 0.0;
};

namespace detail {

inline void check_sigma2(double sigma2) {
  if (!(sigma2 > 0.0)) throw ParameterError("covariance: sigma2 must be > 0");
}

}  // namespace detail

/// Cov(beta_ls) = sigma2 * A^-1 with A = X'X.
inline CovMatrix cov_ls(const GramBlocks& gb, double sigma2) {
  detail::check_sigma2(sigma2);
  return CovMatrix{sigma2 * detail::sym_inverse_checked(gb.a, "cov_ls"), sigma2};
}

/// Cov(beta_ridge) = sigma2 * (A+lambda I)^-1 A (A+lambda I)^-1.
inline CovMatrix cov_ridge(const GramBlocks& gb, double sigma2, double lambda) {
  detail::check_sigma2(sigma2);
  if (!(lambda >= 0.0)) throw ParameterError("cov_ridge: lambda must be >= 0");
  const int d = gb.dim();
  Eigen::MatrixXd shifted = gb.a;
  shifted.diagonal().array() += lambda;
  Eigen::MatrixXd inv = lambda > 0.0
                            ? Eigen::MatrixXd(shifted.ldlt().solve(Eigen::MatrixXd::Identity(d, d)))
                            : detail::sym_inverse_checked(shifted, "cov_ridge");
  return CovMatrix{sigma2 * inv * gb.a * inv, sigma2};
}

/// Cov of the split estimator: sigma2 * M A M where M holds the block inverses
/// of the (covering) partition on its block diagonal.
inline CovMatrix cov_split(const GramBlocks& gb, double sigma2) {
  detail::check_sigma2(sigma2);
  if (!gb.partition.covers(gb.dim()))
    throw ParameterError("cov_split: partition must cover every design column exactly once");
  Eigen::MatrixXd m = scatter_block_diagonal(gb);
  return CovMatrix{sigma2 * m * gb.a * m, sigma2};
}

/// Cov of the garrote estimator: sigma2 * D A^-1 D with D = diag(omega).
inline CovMatrix cov_garrote(const GramBlocks& gb, double sigma2, const Eigen::VectorXd& omega) {
  detail::check_sigma2(sigma2);
  detail::check_unit_interval(omega, gb.dim(), "cov_garrote");
  Eigen::MatrixXd ainv = detail::sym_inverse_checked(gb.a, "cov_garrote");
  return CovMatrix{sigma2 * omega.asDiagonal() * ainv * omega.asDiagonal(), sigma2};
}

/// Mean of the split estimator under E(y) = X beta: M A beta (identity when the
/// partition has a single group and A is invertible).
inline Eigen::VectorXd split_mean(const GramBlocks& gb, const Eigen::VectorXd& beta) {
  if (beta.size() != gb.dim()) throw ParameterError("split_mean: beta length mismatch");
  if (!gb.partition.covers(gb.dim()))
    throw ParameterError("split_mean: partition must cover every design column exactly once");
  return scatter_block_diagonal(gb) * (gb.a * beta);
}

/// Generalized variance: det of the covariance matrix.
inline double generalized_variance(const CovMatrix& c) { return c.m.determinant(); }

/// Total variance: trace of the covariance matrix.
inline double total_variance(const CovMatrix& c) { return c.m.trace(); }

}  // namespace splitreg
