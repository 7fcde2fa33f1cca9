#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "splitreg/errors.hpp"

namespace splitreg {

/// Value of f(x) = x'Qx - 2 b'x.
inline double quadratic_value(const Eigen::MatrixXd& q_mat, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& x) {
  return x.dot(q_mat * x) - 2.0 * b.dot(x);
}

/// Exact minimizer of the convex quadratic f(x) = x'Qx - 2 b'x over the box
/// [lo, hi]^d (Q symmetric PSD). Enumerates all 3^d active-set patterns
/// (each coordinate at lo, at hi, or interior), solves the reduced stationarity
/// system for the interior block, clamps, and keeps the best feasible candidate.
/// Deliberately brute force - exact for a convex objective - so d is capped at 12.
inline Eigen::VectorXd minimize_box_quadratic(const Eigen::MatrixXd& q_mat,
                                              const Eigen::VectorXd& b, double lo, double hi) {
  const int d = static_cast<int>(q_mat.rows());
  if (q_mat.cols() != d || b.size() != d)
    throw ParameterError("minimize_box_quadratic: shape mismatch");
  if (!(lo < hi)) throw ParameterError("minimize_box_quadratic: need lo < hi");
  if (d > 12) throw ParameterError("minimize_box_quadratic: dimension capped at 12");
  long patterns = 1;
  for (int j = 0; j < d; ++j) patterns *= 3;

  Eigen::VectorXd best = Eigen::VectorXd::Constant(d, lo);
  double best_value = quadratic_value(q_mat, b, best);
  std::vector<int> state(d);  // 0 = at lo, 1 = interior, 2 = at hi

  for (long code = 0; code < patterns; ++code) {
    long rest = code;
    std::vector<int> free_idx;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) {
      state[j] = static_cast<int>(rest % 3);
      rest /= 3;
      if (state[j] == 0) x[j] = lo;
      else if (state[j] == 2) x[j] = hi;
      else free_idx.push_back(j);
    }
    if (!free_idx.empty()) {
      const int k = static_cast<int>(free_idx.size());
      Eigen::MatrixXd qff(k, k);
      Eigen::VectorXd rhs(k);
      for (int a = 0; a < k; ++a) {
        rhs[a] = b[free_idx[a]];
        for (int c = 0; c < k; ++c) qff(a, c) = q_mat(free_idx[a], free_idx[c]);
      }
      for (int a = 0; a < k; ++a) {
        double fixed = 0.0;
        for (int j = 0; j < d; ++j)
          if (state[j] != 1) fixed += q_mat(free_idx[a], j) * x[j];
        rhs[a] -= fixed;
      }
      Eigen::VectorXd xf = qff.ldlt().solve(rhs);
      if (!xf.allFinite() || (qff * xf - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) {
        // Singular reduced block: fall back to a rank-revealing least-squares solve.
        xf = qff.completeOrthogonalDecomposition().solve(rhs);
        if (!xf.allFinite()) continue;
      }
      for (int a = 0; a < k; ++a) x[free_idx[a]] = std::min(hi, std::max(lo, xf[a]));
    }
    double value = quadratic_value(q_mat, b, x);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  return best;
}

/// Nonnegative least squares stated through normal equations: minimizes
/// f(x) = x'Qx - 2 b'x subject to x >= 0, with Q = Z'Z PSD. Lawson-Hanson
/// active-set iteration; exits with the KKT conditions satisfied to kkt_tol.
inline Eigen::VectorXd nnls_normal(const Eigen::MatrixXd& q_mat, const Eigen::VectorXd& b,
                                   double kkt_tol = 1e-10) {
  const int d = static_cast<int>(q_mat.rows());
  if (q_mat.cols() != d || b.size() != d) throw ParameterError("nnls_normal: shape mismatch");
  double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  std::vector<bool> active(d, false);  // true = in the positive (passive) set

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<int> idx;
    for (int j = 0; j < d; ++j)
      if (active[j]) idx.push_back(j);
    z = Eigen::VectorXd::Zero(d);
    if (idx.empty()) return;
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXd qpp(k, k);
    Eigen::VectorXd bp(k);
    for (int a = 0; a < k; ++a) {
      bp[a] = b[idx[a]];
      for (int c = 0; c < k; ++c) qpp(a, c) = q_mat(idx[a], idx[c]);
    }
    Eigen::VectorXd zp = qpp.ldlt().solve(bp);
    if (!zp.allFinite()) zp = qpp.completeOrthogonalDecomposition().solve(bp);
    for (int a = 0; a < k; ++a) z[idx[a]] = zp[a];
  };

  const int max_outer = 3 * d * d + 30;
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::VectorXd w = b - q_mat * x;  // -(1/2) gradient
    int pick = -1;
    double wmax = kkt_tol * scale;
    for (int j = 0; j < d; ++j)
      if (!active[j] && w[j] > wmax) {
        wmax = w[j];
        pick = j;
      }
    if (pick < 0) return x;
    active[pick] = true;
    for (int inner = 0; inner < max_outer; ++inner) {
      Eigen::VectorXd z;
      solve_passive(z);
      bool all_positive = true;
      for (int j = 0; j < d; ++j)
        if (active[j] && z[j] <= 0.0) all_positive = false;
      if (all_positive) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (int j = 0; j < d; ++j)
        if (active[j] && z[j] <= 0.0 && x[j] > z[j]) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      x += alpha * (z - x);
      for (int j = 0; j < d; ++j)
        if (active[j] && x[j] <= kkt_tol * scale) {
          x[j] = 0.0;
          active[j] = false;
        }
    }
  }
  throw ConvergenceError("nnls_normal: active-set iteration did not terminate",
                         {x}, 0.0);
}

}  // namespace splitreg
