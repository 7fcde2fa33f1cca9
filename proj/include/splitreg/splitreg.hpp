#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "splitreg/box_qp.hpp"
#include "splitreg/dataset.hpp"
#include "splitreg/elastic_net.hpp"
#include "splitreg/errors.hpp"

namespace splitreg {

struct SplitRegConfig {
  int groups = 2;
  double lambda_s = 0.0;  // sparsity penalty (elastic-net mix via alpha)
  double alpha = 1.0;
  double lambda_d = 0.0;  // diversity penalty pushing groups onto disjoint supports
  int max_sweeps = 100000;
  double tolerance = 1e-8;
};

enum class Aggregation { uniform, weighted };

/// G coefficient vectors plus the convex-combination weights used to pool
/// their predictions. Uniform aggregation fixes delta = (1/G, ..., 1/G).
struct SplitRegFit {
  std::vector<Eigen::VectorXd> betas;
  Aggregation aggregation = Aggregation::uniform;
  Eigen::VectorXd delta;

  int groups() const { return static_cast<int>(betas.size()); }
};

namespace detail {

inline void check_splitreg_config(const SplitRegConfig& cfg, const char* name) {
  if (cfg.groups < 1) throw ParameterError(std::string(name) + ": groups must be >= 1");
  if (!(cfg.lambda_d >= 0.0)) throw ParameterError(std::string(name) + ": lambda_d must be >= 0");
  check_enet_config(cfg.lambda_s, cfg.alpha, cfg.max_sweeps, cfg.tolerance, name);
}

}  // namespace detail

/// Sum of per-group elastic-net objectives plus the pairwise diversity penalty
/// (lambda_d/2) sum_{g != h} sum_j |b_gj| |b_hj|.
inline double splitreg_objective(const Dataset& ds, const std::vector<Eigen::VectorXd>& betas,
                                 const SplitRegConfig& cfg) {
  detail::check_splitreg_config(cfg, "splitreg_objective");
  if (static_cast<int>(betas.size()) != cfg.groups)
    throw ParameterError("splitreg_objective: group count mismatch");
  double total = 0.0;
  for (const auto& beta : betas)
    total += enet_objective(ds, beta, EnetConfig{cfg.lambda_s, cfg.alpha});
  for (std::size_t g = 0; g < betas.size(); ++g)
    for (std::size_t h = 0; h < betas.size(); ++h)
      if (h != g) total += 0.5 * cfg.lambda_d * betas[g].cwiseAbs().dot(betas[h].cwiseAbs());
  return total;
}

/// Fits G models jointly by cyclic block coordinate descent. Starts from zeros
/// (or `init`) and sweeps group by group, coordinate by coordinate; each step
/// solves its one-dimensional subproblem exactly, so the objective never
/// increases. G = 1 reduces to fit_elastic_net step for step.
inline SplitRegFit fit_splitreg(const Dataset& ds, const SplitRegConfig& cfg,
                                const std::vector<Eigen::VectorXd>* init = nullptr) {
  detail::check_splitreg_config(cfg, "fit_splitreg");
  std::vector<Eigen::VectorXd> betas(cfg.groups);
  if (init) {
    if (static_cast<int>(init->size()) != cfg.groups)
      throw ParameterError("fit_splitreg: init group count mismatch");
    for (int g = 0; g < cfg.groups; ++g) {
      if ((*init)[g].size() != ds.d())
        throw ParameterError("fit_splitreg: init coefficient length mismatch");
      betas[g] = (*init)[g];
    }
  } else {
    for (int g = 0; g < cfg.groups; ++g) betas[g] = Eigen::VectorXd::Zero(ds.d());
  }
  detail::block_cd(ds.x, ds.y, cfg.lambda_s, cfg.alpha, cfg.lambda_d, betas, cfg.max_sweeps,
                   cfg.tolerance);
  SplitRegFit fit;
  fit.betas = std::move(betas);
  fit.aggregation = Aggregation::uniform;
  fit.delta = Eigen::VectorXd::Constant(cfg.groups, 1.0 / cfg.groups);
  return fit;
}

/// Pooled coefficient vector. Uniform aggregation averages exactly
/// (sum of groups divided by G); weighted aggregation uses fit.delta.
inline Eigen::VectorXd aggregate(const SplitRegFit& fit) {
  if (fit.betas.empty()) throw ParameterError("aggregate: empty fit");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(fit.betas[0].size());
  if (fit.aggregation == Aggregation::uniform) {
    for (const auto& beta : fit.betas) sum += beta;
    return sum / static_cast<double>(fit.groups());
  }
  if (fit.delta.size() != fit.groups())
    throw ParameterError("aggregate: delta length does not match group count");
  for (int g = 0; g < fit.groups(); ++g) sum += fit.delta[g] * fit.betas[g];
  return sum;
}

inline double predict_splitreg(const SplitRegFit& fit, const Eigen::VectorXd& x0) {
  Eigen::VectorXd pooled = aggregate(fit);
  if (x0.size() != pooled.size()) throw ParameterError("predict_splitreg: dimension mismatch");
  return x0.dot(pooled);
}

/// Nonnegative stacking weights: refits the G models on each leave-one-out
/// training set, collects the held-out predictions z_ig, and solves
/// min_{delta >= 0} ||y - Z delta||^2 via NNLS on the normal equations.
inline Eigen::VectorXd stacking_weights(const Dataset& ds, const SplitRegConfig& cfg) {
  detail::check_splitreg_config(cfg, "stacking_weights");
  const int n = ds.n();
  if (n < cfg.groups + 1)
    throw ParameterError("stacking_weights: need at least groups+1 observations");
  Eigen::MatrixXd z(n, cfg.groups);
  Eigen::MatrixXd x_loo(n - 1, ds.d());
  Eigen::VectorXd y_loo(n - 1);
  for (int i = 0; i < n; ++i) {
    x_loo.topRows(i) = ds.x.topRows(i);
    x_loo.bottomRows(n - 1 - i) = ds.x.bottomRows(n - 1 - i);
    y_loo.head(i) = ds.y.head(i);
    y_loo.tail(n - 1 - i) = ds.y.tail(n - 1 - i);
    try {
      SplitRegFit fit = fit_splitreg(Dataset{x_loo, y_loo, ds.standardized}, cfg);
      for (int g = 0; g < cfg.groups; ++g) z(i, g) = ds.x.row(i).dot(fit.betas[g]);
    } catch (const Error& e) {
      throw Error("stacking_weights: leave-one-out refit failed at row " + std::to_string(i + 1) +
                  ": " + e.what());
    }
  }
  return nnls_normal(z.transpose() * z, z.transpose() * ds.y);
}

}  // namespace splitreg
