#pragma once

#include <Eigen/Dense>
#include <string>

#include "splitreg/errors.hpp"

namespace splitreg {

/// Equicorrelation matrix: ones on the diagonal, c everywhere else.
inline Eigen::MatrixXd equicorrelation_matrix(int d, double c) {
  if (d < 1) throw ParameterError("equicorrelation_matrix: d must be >= 1");
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, c);
  m.diagonal().setOnes();
  return m;
}

/// The pair of d x d correlation targets used throughout the harness:
/// gamma_rho describes the population the test points are drawn from, and
/// gamma_r is the target the training designs' empirical correlation is
/// forced to match exactly.
struct CorrelationSpec {
  int dim = 0;
  double rho = 0.0;  // population correlation
  double r = 0.0;    // empirical (within-sample) correlation target
  Eigen::MatrixXd gamma_rho;
  Eigen::MatrixXd gamma_r;
};

/// Builds an equicorrelated CorrelationSpec, checking both matrices are
/// positive definite: an equicorrelation parameter must lie in
/// (-1/(d-1), 1) for d >= 2.
inline CorrelationSpec equicorrelation_spec(int d, double rho, double r) {
  if (d < 1) throw ParameterError("equicorrelation_spec: d must be >= 1");
  auto check = [d](double c, const char* name) {
    double lower = d >= 2 ? -1.0 / (d - 1) : -1.0;
    if (!(c > lower && c < 1.0))
      throw ParameterError(std::string("equicorrelation_spec: ") + name + "=" +
                           std::to_string(c) + " is outside (" + std::to_string(lower) +
                           ", 1) so the matrix is not positive definite");
  };
  check(rho, "rho");
  check(r, "r");
  return CorrelationSpec{d, rho, r, equicorrelation_matrix(d, rho), equicorrelation_matrix(d, r)};
}

}  // namespace splitreg
