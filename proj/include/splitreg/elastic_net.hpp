#pragma once

#include <Eigen/Core>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "splitreg/dataset.hpp"
#include "splitreg/errors.hpp"
#include "splitreg/estimators.hpp"

namespace splitreg {

/// Soft-thresholding operator: sign(z) * max(|z| - t, 0).
inline double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

namespace detail {

/// Cyclic coordinate descent over G coefficient vectors sharing one design.
///
/// Minimizes sum_g [ (1/2n)||y - X b_g||^2
///                   + lambda_s ((1-alpha)/2 ||b_g||^2 + alpha ||b_g||_1) ]
///           + (lambda_d/2) sum_g sum_{h != g} sum_j |b_gj| |b_hj|.
///
/// The coordinate update is closed form: with z = (1/n) x_j'(y - X b_g + x_j b_gj),
/// b_gj <- S(z, lambda_s alpha + lambda_d sum_{h != g} |b_hj|) / ((1/n)||x_j||^2 + lambda_s (1-alpha)).
/// With G = 1 the coupling term vanishes and this is exactly elastic-net
/// coordinate descent, so single-model fits share every arithmetic step with
/// multi-model fits - a property the test suite relies on.
///
/// Returns the number of sweeps used; throws ConvergenceError past max_sweeps.
inline int block_cd(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda_s,
                    double alpha, double lambda_d, std::vector<Eigen::VectorXd>& betas,
                    int max_sweeps, double tolerance) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  const int num_groups = static_cast<int>(betas.size());
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::VectorXd col_ms(d);  // (1/n)||x_j||^2
  for (int j = 0; j < d; ++j) col_ms[j] = x.col(j).squaredNorm() * inv_n;

  std::vector<Eigen::VectorXd> residuals(num_groups);
  Eigen::VectorXd sum_abs = Eigen::VectorXd::Zero(d);
  for (int g = 0; g < num_groups; ++g) {
    residuals[g] = y - x * betas[g];
    sum_abs += betas[g].cwiseAbs();
  }

  double max_delta = 0.0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    max_delta = 0.0;
    for (int g = 0; g < num_groups; ++g) {
      Eigen::VectorXd& beta = betas[g];
      Eigen::VectorXd& resid = residuals[g];
      for (int j = 0; j < d; ++j) {
        double old = beta[j];
        double z = x.col(j).dot(resid) * inv_n + col_ms[j] * old;
        double threshold = lambda_s * alpha + lambda_d * (sum_abs[j] - std::abs(old));
        double denom = col_ms[j] + lambda_s * (1.0 - alpha);
        double fresh = denom > 0.0 ? soft_threshold(z, threshold) / denom : 0.0;
        if (fresh != old) {
          resid -= x.col(j) * (fresh - old);
          sum_abs[j] += std::abs(fresh) - std::abs(old);
          beta[j] = fresh;
          max_delta = std::max(max_delta, std::abs(fresh - old));
        }
      }
    }
    if (max_delta < tolerance) return sweep;
  }
  throw ConvergenceError("coordinate descent did not converge in " + std::to_string(max_sweeps) +
                             " sweeps (last max coefficient change " + std::to_string(max_delta) + ")",
                         betas, max_delta);
}

}  // namespace detail

struct EnetConfig {
  double lambda = 0.0;
  double alpha = 1.0;  // 1 = lasso, 0 = ridge-type quadratic penalty
  int max_sweeps = 100000;
  double tolerance = 1e-8;
};

namespace detail {

inline void check_enet_config(double lambda, double alpha, int max_sweeps, double tolerance,
                              const char* name) {
  if (!(lambda >= 0.0)) throw ParameterError(std::string(name) + ": lambda must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ParameterError(std::string(name) + ": alpha must lie in [0,1]");
  if (max_sweeps < 1) throw ParameterError(std::string(name) + ": max_sweeps must be >= 1");
  if (!(tolerance > 0.0)) throw ParameterError(std::string(name) + ": tolerance must be > 0");
}

}  // namespace detail

/// (1/2n)||y - X beta||^2 + lambda ((1-alpha)/2 ||beta||^2 + alpha ||beta||_1).
inline double enet_objective(const Dataset& ds, const Eigen::VectorXd& beta,
                             const EnetConfig& cfg) {
  if (beta.size() != ds.d()) throw ParameterError("enet_objective: beta length mismatch");
  double rss = (ds.y - ds.x * beta).squaredNorm() / (2.0 * ds.n());
  double pen = cfg.lambda * ((1.0 - cfg.alpha) / 2.0 * beta.squaredNorm() +
                             cfg.alpha * beta.lpNorm<1>());
  return rss + pen;
}

/// Coordinate-descent elastic net. Optional warm start; zero start otherwise.
inline FitResult fit_elastic_net(const Dataset& ds, const EnetConfig& cfg,
                                 const std::optional<Eigen::VectorXd>& init = std::nullopt) {
  detail::check_enet_config(cfg.lambda, cfg.alpha, cfg.max_sweeps, cfg.tolerance,
                            "fit_elastic_net");
  std::vector<Eigen::VectorXd> betas(1);
  if (init) {
    if (init->size() != ds.d()) throw ParameterError("fit_elastic_net: init length mismatch");
    betas[0] = *init;
  } else {
    betas[0] = Eigen::VectorXd::Zero(ds.d());
  }
  detail::block_cd(ds.x, ds.y, cfg.lambda, cfg.alpha, 0.0, betas, cfg.max_sweeps, cfg.tolerance);
  return FitResult{std::move(betas[0]), EnetTuning{cfg.lambda, cfg.alpha}};
}

/// Lasso = elastic net at alpha = 1.
inline FitResult fit_lasso(const Dataset& ds, double lambda, int max_sweeps = 100000,
                           double tolerance = 1e-8) {
  return fit_elastic_net(ds, EnetConfig{lambda, 1.0, max_sweeps, tolerance});
}

/// Largest KKT violation of the elastic-net stationarity conditions at beta:
/// g_j = (1/n) x_j'(y - X beta) - lambda (1-alpha) beta_j must equal
/// lambda alpha sign(beta_j) on the support and lie in [-lambda alpha, lambda alpha] off it.
inline double enet_kkt_residual(const Dataset& ds, const Eigen::VectorXd& beta,
                                const EnetConfig& cfg) {
  if (beta.size() != ds.d()) throw ParameterError("enet_kkt_residual: beta length mismatch");
  Eigen::VectorXd grad = ds.x.transpose() * (ds.y - ds.x * beta) / static_cast<double>(ds.n()) -
                         cfg.lambda * (1.0 - cfg.alpha) * beta;
  double worst = 0.0;
  for (int j = 0; j < ds.d(); ++j) {
    double v = beta[j] != 0.0 ? std::abs(grad[j] - cfg.lambda * cfg.alpha * (beta[j] > 0 ? 1.0 : -1.0))
                              : std::max(0.0, std::abs(grad[j]) - cfg.lambda * cfg.alpha);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace splitreg
