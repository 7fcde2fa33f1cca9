#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "splitreg/dataset.hpp"
#include "splitreg/errors.hpp"
#include "splitreg/partition.hpp"

namespace splitreg {

namespace detail {

/// Inverse of a symmetric PSD matrix via spectral decomposition, with a
/// reciprocal-condition check (min|eig| / max|eig| must exceed 1e-12).
inline Eigen::MatrixXd sym_inverse_checked(const Eigen::MatrixXd& m, const std::string& context,
                                           double* rcond_out = nullptr) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success)
    throw SingularMatrixError(context + ": eigendecomposition failed", 0.0);
  const auto& vals = eig.eigenvalues();
  double lo = vals.cwiseAbs().minCoeff();
  double hi = vals.cwiseAbs().maxCoeff();
  double rcond = hi > 0.0 ? lo / hi : 0.0;
  if (rcond_out) *rcond_out = rcond;
  if (!(rcond > 1e-12))
    throw SingularMatrixError(
        context + ": matrix is singular to working precision (rcond=" + std::to_string(rcond) + ")",
        rcond);
  return eig.eigenvectors() * vals.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

/// The Gram matrix A = X'X of a design together with the inverse of each
/// diagonal block A_gg selected by a partition. The partition need not cover
/// all columns; groups with non-adjacent indices are fine.
struct GramBlocks {
  Eigen::MatrixXd a;                          // full X'X, d x d
  Partition partition;
  std::vector<Eigen::MatrixXd> block_inverse; // one per group, canonical group order

  int dim() const { return static_cast<int>(a.rows()); }
};

inline GramBlocks gram_blocks(const Dataset& ds, const Partition& p) {
  const int d = ds.d();
  if (p.max_index() >= d)
    throw ParameterError("gram_blocks: partition index exceeds design width");
  GramBlocks gb{ds.x.transpose() * ds.x, p, {}};
  gb.block_inverse.reserve(p.groups().size());
  int g = 0;
  for (const auto& group : p.groups()) {
    const int k = static_cast<int>(group.size());
    Eigen::MatrixXd block(k, k);
    for (int a_i = 0; a_i < k; ++a_i)
      for (int b_i = 0; b_i < k; ++b_i) block(a_i, b_i) = gb.a(group[a_i], group[b_i]);
    gb.block_inverse.push_back(
        detail::sym_inverse_checked(block, "gram_blocks: group " + std::to_string(g + 1)));
    ++g;
  }
  return gb;
}

/// The d x d matrix holding each group's block inverse at its index positions
/// and zeros elsewhere. For a covering partition this is the block-diagonal
/// (up to index permutation) matrix diag(A_11^-1, ..., A_GG^-1).
inline Eigen::MatrixXd scatter_block_diagonal(const GramBlocks& gb) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(gb.dim(), gb.dim());
  for (std::size_t g = 0; g < gb.block_inverse.size(); ++g) {
    const auto& group = gb.partition.groups()[g];
    const auto& inv = gb.block_inverse[g];
    for (std::size_t a_i = 0; a_i < group.size(); ++a_i)
      for (std::size_t b_i = 0; b_i < group.size(); ++b_i)
        m(group[a_i], group[b_i]) = inv(a_i, b_i);
  }
  return m;
}

}  // namespace splitreg
