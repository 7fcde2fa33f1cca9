#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "splitreg/correlation.hpp"
#include "splitreg/dataset.hpp"
#include "splitreg/errors.hpp"
#include "splitreg/rng.hpp"

namespace splitreg {

/// n iid rows from N(0, gamma) where gamma is a correlation/covariance matrix:
/// standard-normal rows times the upper-triangular Cholesky factor.
inline Eigen::MatrixXd draw_population(int n, const Eigen::MatrixXd& gamma, RngStream& stream) {
  const int d = static_cast<int>(gamma.rows());
  if (gamma.cols() != d) throw ParameterError("draw_population: gamma must be square");
  if (n < 1) throw ParameterError("draw_population: n must be >= 1");
  Eigen::LLT<Eigen::MatrixXd> llt(gamma);
  if (llt.info() != Eigen::Success)
    throw GenerationError("draw_population: covariance is not positive definite");
  return stream.normal_matrix(n, d) * llt.matrixU();
}

/// Lower-triangular factor L with L L' = gamma (classic Cholesky recurrence,
/// written out directly). Kept as an independent arithmetic path for checking
/// the column-by-column construction in `generate`, which never forms it.
inline Eigen::MatrixXd triangular_factor(const Eigen::MatrixXd& gamma) {
  const int d = static_cast<int>(gamma.rows());
  if (gamma.cols() != d) throw ParameterError("triangular_factor: matrix must be square");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = gamma(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0))
          throw GenerationError("triangular_factor: matrix is not positive definite (pivot " +
                                std::to_string(i + 1) + ")");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

struct TargetCovRequest {
  int n = 0;              // rows to generate; must exceed the dimension
  CorrelationSpec spec;   // gamma_rho seeds the draw, gamma_r is matched exactly
  RngStream stream;
};

/// Generates an n x d standardized design whose *empirical* correlation matrix
/// (1/n convention) equals spec.gamma_r up to floating-point roundoff.
///
/// Construction: draw from N(0, gamma_rho); standardize columns; rotate onto
/// the sample principal axes and rescale so the empirical covariance becomes
/// the identity exactly; then rebuild correlated columns one at a time, each a
/// combination of the previous orthonormal columns chosen so its sample
/// correlation with every earlier column hits the target, plus a remainder
/// kept orthogonal. The randomness only picks the orientation; the moment
/// structure is enforced by construction.
inline Eigen::MatrixXd generate(TargetCovRequest req) {
  const int n = req.n;
  const int d = req.spec.dim;
  if (n <= d) throw ParameterError("generate: need n > d for a full-rank sample");

  Eigen::MatrixXd raw = draw_population(n, req.spec.gamma_rho, req.stream);
  Eigen::MatrixXd x = standardize(raw, Eigen::VectorXd::Zero(n)).data.x;

  Eigen::MatrixXd s = (x.transpose() * x) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success)
    throw GenerationError("generate: eigendecomposition of the sample covariance failed");
  if (!(eig.eigenvalues().minCoeff() > 1e-12))
    throw GenerationError("generate: sample covariance is numerically rank-deficient");

  // Deterministic basis: eigenvalues descending; each eigenvector's
  // largest-magnitude entry made positive (first such entry on ties).
  Eigen::MatrixXd p(d, d);
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - j);
    int arg = 0;
    for (int i = 1; i < d; ++i)
      if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
    p.col(j) = v[arg] < 0.0 ? Eigen::VectorXd(-v) : v;
  }

  Eigen::MatrixXd z = x * p;
  for (int j = 0; j < d; ++j) {
    double ms = z.col(j).squaredNorm() / static_cast<double>(n);
    if (!(ms > 1e-12)) throw GenerationError("generate: degenerate principal column");
    z.col(j) /= std::sqrt(ms);
  }

  // Column-by-column rebuild. l holds the mixing rows found so far; column k
  // solves the forward-substitution system putting its sample correlation with
  // columns 1..k-1 at the target values.
  Eigen::MatrixXd y(n, d);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
  y.col(0) = z.col(0);
  l(0, 0) = 1.0;
  for (int k = 1; k < d; ++k) {
    Eigen::VectorXd u(k);
    for (int i = 0; i < k; ++i) {
      double s_ik = req.spec.gamma_r(i, k);
      for (int m = 0; m < i; ++m) s_ik -= l(i, m) * u[m];
      u[i] = s_ik / l(i, i);
    }
    double rem = 1.0 - u.squaredNorm();
    if (!(rem > 1e-12))
      throw GenerationError(
          "generate: correlation target is not positive definite at column " +
          std::to_string(k + 1));
    double nu = std::sqrt(rem);
    y.col(k) = z.leftCols(k) * u + nu * z.col(k);
    l.row(k).head(k) = u;
    l(k, k) = nu;
  }
  return y;
}

}  // namespace splitreg
