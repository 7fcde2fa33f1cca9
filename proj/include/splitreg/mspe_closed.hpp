#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "splitreg/box_qp.hpp"
#include "splitreg/errors.hpp"

namespace splitreg {

/// Closed-form excess MSPEs for the two-predictor case: n observations, design
/// standardized with empirical correlation r, test points drawn with population
/// correlation rho, noise variance sigma2. "Excess" means the irreducible
/// sigma2 is excluded throughout; the Monte Carlo counterpart includes it.

namespace detail {

inline void check_closed_args(double sigma2, int n, double r, double rho, const char* name) {
  if (!(sigma2 > 0.0)) throw ParameterError(std::string(name) + ": sigma2 must be > 0");
  if (n < 1) throw ParameterError(std::string(name) + ": n must be >= 1");
  if (!(std::abs(r) < 1.0)) throw ParameterError(std::string(name) + ": need |r| < 1");
  if (!(std::abs(rho) < 1.0)) throw ParameterError(std::string(name) + ": need |rho| < 1");
}

inline void check_w2(const Eigen::Vector2d& w, const char* name) {
  for (int j = 0; j < 2; ++j)
    if (!(w[j] >= 0.0 && w[j] <= 1.0))
      throw ParameterError(std::string(name) + ": weights must lie in [0,1]");
}

}  // namespace detail

/// Least squares: 2 (sigma2/n) (1 - r rho) / (1 - r^2).
inline double mspe_ls_closed(double sigma2, int n, double r, double rho) {
  detail::check_closed_args(sigma2, n, r, rho, "mspe_ls_closed");
  return 2.0 * (sigma2 / n) * (1.0 - r * rho) / (1.0 - r * r);
}

/// Componentwise-shrunken least squares (garrote), weights w in [0,1]^2:
/// bias (w1-1)^2 b1^2 + (w2-1)^2 b2^2 + 2 rho (w1-1)(w2-1) b1 b2
/// plus variance sigma2 (w1^2 + w2^2 - 2 r rho w1 w2) / (n (1 - r^2)).
inline double mspe_garrote_closed(const Eigen::Vector2d& w, const Eigen::Vector2d& beta,
                                  double sigma2, int n, double r, double rho) {
  detail::check_closed_args(sigma2, n, r, rho, "mspe_garrote_closed");
  detail::check_w2(w, "mspe_garrote_closed");
  double bias = (w[0] - 1.0) * (w[0] - 1.0) * beta[0] * beta[0] +
                (w[1] - 1.0) * (w[1] - 1.0) * beta[1] * beta[1] +
                2.0 * rho * (w[0] - 1.0) * (w[1] - 1.0) * beta[0] * beta[1];
  double var = sigma2 * (w[0] * w[0] + w[1] * w[1] - 2.0 * r * rho * w[0] * w[1]) /
               (n * (1.0 - r * r));
  return bias + var;
}

/// Ridge with penalty lambda >= 0:
/// delta^-2 ((lambda/n)^2 b'B Gamma_rho B b + sigma2 tr(Gamma_rho V)/n) with
/// delta = (1+lambda/n)^2 - r^2, B = [[1+lambda/n, -r], [-r, 1+lambda/n]],
/// v11 = v22 = (1+lambda/n)^2 - r^2 (1+2 lambda/n), v12 = v21 = r ((lambda/n)^2 - 1 + r^2).
inline double mspe_ridge_closed(double lambda, const Eigen::Vector2d& beta, double sigma2, int n,
                                double r, double rho) {
  detail::check_closed_args(sigma2, n, r, rho, "mspe_ridge_closed");
  if (!(lambda >= 0.0)) throw ParameterError("mspe_ridge_closed: lambda must be >= 0");
  double m = lambda / n;
  double delta = (1.0 + m) * (1.0 + m) - r * r;
  Eigen::Matrix2d b_mat;
  b_mat << 1.0 + m, -r, -r, 1.0 + m;
  Eigen::Matrix2d gamma_rho;
  gamma_rho << 1.0, rho, rho, 1.0;
  double v11 = (1.0 + m) * (1.0 + m) - r * r * (1.0 + 2.0 * m);
  double v12 = r * (m * m - 1.0 + r * r);
  double trace_gv = 2.0 * (v11 + rho * v12);
  double bias = m * m * beta.dot(b_mat * gamma_rho * b_mat * beta);
  return (bias + sigma2 * trace_gv / n) / (delta * delta);
}

/// Shrunken two-group split, weights w in [0,1]^2:
/// bias b'T' Gamma_rho T b with T = I - diag(w) Gamma_r, plus variance
/// (sigma2/n) tr(Gamma_rho W Gamma_r W).
inline double mspe_split2_closed(const Eigen::Vector2d& w, const Eigen::Vector2d& beta,
                                 double sigma2, int n, double r, double rho) {
  detail::check_closed_args(sigma2, n, r, rho, "mspe_split2_closed");
  detail::check_w2(w, "mspe_split2_closed");
  Eigen::Matrix2d t;
  t << 1.0 - w[0], -w[0] * r, -w[1] * r, 1.0 - w[1];
  Eigen::Matrix2d gamma_rho;
  gamma_rho << 1.0, rho, rho, 1.0;
  Eigen::Vector2d tb = t * beta;
  double bias = tb.dot(gamma_rho * tb);
  double var = (sigma2 / n) * (w[0] * w[0] + w[1] * w[1] + 2.0 * rho * r * w[0] * w[1]);
  return bias + var;
}

/// Mean squared estimation error of the *first coefficient* when both
/// predictors are fit jointly by least squares: sigma2 / ((1 - r^2) n).
inline double coef1_mse_joint(double sigma2, int n, double r) {
  detail::check_closed_args(sigma2, n, r, 0.0, "coef1_mse_joint");
  return sigma2 / ((1.0 - r * r) * n);
}

/// Same quantity when each predictor is fit on its own: the omitted-variable
/// bias contributes r^2 beta2^2 and the variance drops to sigma2/n.
inline double coef1_mse_split(double beta2, double sigma2, int n, double r) {
  detail::check_closed_args(sigma2, n, r, 0.0, "coef1_mse_split");
  return r * r * beta2 * beta2 + sigma2 / n;
}

/// The |beta2| below which the split fit estimates the first coefficient more
/// accurately than the joint fit. Located by bisection on the difference of the
/// two closed forms (which is increasing in |beta2|).
inline double split_preference_threshold(double sigma2, int n, double r) {
  detail::check_closed_args(sigma2, n, r, 0.0, "split_preference_threshold");
  if (r == 0.0) return 0.0;  // split never strictly better: variances coincide
  auto diff = [&](double b2) {
    return coef1_mse_split(b2, sigma2, n, r) - coef1_mse_joint(sigma2, n, r);
  };
  double lo = 0.0, hi = 1.0;
  while (diff(hi) < 0.0) hi *= 2.0;
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-14 * hi; ++iter) {
    double mid = 0.5 * (lo + hi);
    (diff(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct RidgeClosedMin {
  double value = 0.0;
  double lambda = 0.0;
};

struct WeightsClosedMin {
  double value = 0.0;
  Eigen::Vector2d w = Eigen::Vector2d::Zero();
};

struct AdaptiveSplitClosedMin {
  double value = 0.0;
  bool two_groups = false;  // false: best single-group (garrote) won
  Eigen::Vector2d w = Eigen::Vector2d::Zero();
};

/// Minimum of the ridge closed form over lambda >= 0: coarse log-spaced scan
/// (lambda/n from 1e-8 to 1e8) followed by golden-section refinement of the
/// bracketing interval; lambda = 0 is always a candidate.
inline RidgeClosedMin minimize_ridge_closed(const Eigen::Vector2d& beta, double sigma2, int n,
                                            double r, double rho) {
  auto f = [&](double lambda) { return mspe_ridge_closed(lambda, beta, sigma2, n, r, rho); };
  const int points = 321;
  const double lo_exp = -8.0, hi_exp = 8.0;
  double best_lambda = 0.0;
  double best_value = f(0.0);
  int best_idx = -1;
  for (int i = 0; i < points; ++i) {
    double lambda = n * std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (points - 1));
    double v = f(lambda);
    if (v < best_value) {
      best_value = v;
      best_lambda = lambda;
      best_idx = i;
    }
  }
  if (best_idx >= 0) {
    auto grid_log = [&](int i) { return std::log(n) + std::log(10.0) * (lo_exp + (hi_exp - lo_exp) * i / (points - 1)); };
    double a = best_idx > 0 ? grid_log(best_idx - 1) : grid_log(best_idx) - 1.0;
    double b = best_idx < points - 1 ? grid_log(best_idx + 1) : grid_log(best_idx) + 1.0;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
    for (int iter = 0; iter < 200 && (b - a) > 1e-12; ++iter) {
      if (f1 < f2) {
        b = x2; x2 = x1; f2 = f1;
        x1 = b - inv_phi * (b - a); f1 = f(std::exp(x1));
      } else {
        a = x1; x1 = x2; f1 = f2;
        x2 = a + inv_phi * (b - a); f2 = f(std::exp(x2));
      }
    }
    double lambda = std::exp(0.5 * (a + b));
    double v = f(lambda);
    if (v < best_value) {
      best_value = v;
      best_lambda = lambda;
    }
  }
  return RidgeClosedMin{best_value, best_lambda};
}

namespace detail {

/// Writes the garrote closed form as w'Qw - 2 b'w + c for exact minimization.
inline void garrote_quadratic(const Eigen::Vector2d& beta, double sigma2, int n, double r,
                              double rho, Eigen::Matrix2d& q_mat, Eigen::Vector2d& b_vec,
                              double& c) {
  Eigen::Matrix2d bias_mat;
  bias_mat << beta[0] * beta[0], rho * beta[0] * beta[1], rho * beta[0] * beta[1],
      beta[1] * beta[1];
  double v = sigma2 / (n * (1.0 - r * r));
  Eigen::Matrix2d var_mat;
  var_mat << v, -v * r * rho, -v * r * rho, v;
  q_mat = bias_mat + var_mat;
  b_vec = bias_mat * Eigen::Vector2d::Ones();
  c = Eigen::Vector2d::Ones().dot(bias_mat * Eigen::Vector2d::Ones());
}

/// Same for the shrunken split closed form.
inline void split2_quadratic(const Eigen::Vector2d& beta, double sigma2, int n, double r,
                             double rho, Eigen::Matrix2d& q_mat, Eigen::Vector2d& b_vec,
                             double& c) {
  Eigen::Matrix2d gamma_rho, gamma_r;
  gamma_rho << 1.0, rho, rho, 1.0;
  gamma_r << 1.0, r, r, 1.0;
  Eigen::Vector2d m = gamma_r * beta;
  q_mat = m.asDiagonal() * gamma_rho * m.asDiagonal() +
          (sigma2 / n) * gamma_rho.cwiseProduct(gamma_r);
  b_vec = m.asDiagonal() * (gamma_rho * beta);
  c = beta.dot(gamma_rho * beta);
}

}  // namespace detail

/// Exact minimum of the garrote closed form over w in [0,1]^2 (convex quadratic).
inline WeightsClosedMin minimize_garrote_closed(const Eigen::Vector2d& beta, double sigma2, int n,
                                                double r, double rho) {
  detail::check_closed_args(sigma2, n, r, rho, "minimize_garrote_closed");
  Eigen::Matrix2d q_mat;
  Eigen::Vector2d b_vec;
  double c = 0.0;
  detail::garrote_quadratic(beta, sigma2, n, r, rho, q_mat, b_vec, c);
  Eigen::VectorXd w = minimize_box_quadratic(q_mat, b_vec, 0.0, 1.0);
  return WeightsClosedMin{quadratic_value(q_mat, b_vec, w) + c, Eigen::Vector2d(w)};
}

/// Exact minimum of the shrunken-split closed form over w in [0,1]^2.
inline WeightsClosedMin minimize_split2_closed(const Eigen::Vector2d& beta, double sigma2, int n,
                                               double r, double rho) {
  detail::check_closed_args(sigma2, n, r, rho, "minimize_split2_closed");
  Eigen::Matrix2d q_mat;
  Eigen::Vector2d b_vec;
  double c = 0.0;
  detail::split2_quadratic(beta, sigma2, n, r, rho, q_mat, b_vec, c);
  Eigen::VectorXd w = minimize_box_quadratic(q_mat, b_vec, 0.0, 1.0);
  return WeightsClosedMin{quadratic_value(q_mat, b_vec, w) + c, Eigen::Vector2d(w)};
}

/// Adaptive choice between splitting and not splitting: the better of the best
/// shrunken split and the best garrote (the single-group competitor).
inline AdaptiveSplitClosedMin minimize_adaptive_split_closed(const Eigen::Vector2d& beta,
                                                             double sigma2, int n, double r,
                                                             double rho) {
  WeightsClosedMin garrote = minimize_garrote_closed(beta, sigma2, n, r, rho);
  WeightsClosedMin split2 = minimize_split2_closed(beta, sigma2, n, r, rho);
  if (split2.value < garrote.value) return AdaptiveSplitClosedMin{split2.value, true, split2.w};
  return AdaptiveSplitClosedMin{garrote.value, false, garrote.w};
}

}  // namespace splitreg
