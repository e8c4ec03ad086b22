#pragma once

#include "ftsp/curves.hpp"

namespace ftsp {

/// Estimated mean, leading eigenpairs of the covariance operator, and the full
/// spectrum needed for tail sums and variance-explained proportions.
struct EigenSystem {
  Grid grid{2};
  Vector mean;            // length T
  Vector eigenvalues;     // lambda_1 >= ... >= lambda_d >= 0
  Matrix eigenfunctions;  // d x T, orthonormal under the grid inner product
  Vector spectrum;        // every eigenvalue of the discretized operator, descending
  double total_variance = 0.0;

  Index dim() const noexcept { return eigenvalues.size(); }
  /// total_variance - sum_{l <= d} lambda_l, clamped at zero.
  double tail_sum(Index d) const;
  /// Proportion of variance explained by the first d eigenfunctions.
  double pve(Index d) const;
  /// Number of eigenvalues above the numerical-rank threshold 1e-12 * lambda_1.
  Index numerical_rank() const;
};

using ScoreMatrix = Matrix;

Vector sample_mean(const FunctionalDataset& data);

/// T x T kernel c(t_i, t_j) = (1/n) sum_k (Y_k(t_i) - mu(t_i)) (Y_k(t_j) - mu(t_j)).
Matrix sample_covariance_kernel(const FunctionalDataset& data);

EigenSystem eigensystem(const FunctionalDataset& data, Index d);

/// Keeps the first d eigenpairs; d must not exceed eig.dim().
EigenSystem truncate(const EigenSystem& eig, Index d);

/// Smallest d whose proportion of variance explained reaches `threshold`,
/// capped at the numerical rank. Returns 0 for zero-variance data.
Index dimension_for_pve(const EigenSystem& eig, double threshold);

/// Centered scores <Y_k - mu, v_l> of the dataset rows.
ScoreMatrix scores(const FunctionalDataset& data, const EigenSystem& eig);

/// Same projection for raw curves given as rows of a matrix.
ScoreMatrix project(const Matrix& curves, const EigenSystem& eig);

/// Row k = mu + sum_l scores(k, l) v_l.
FunctionalDataset reconstruct(const ScoreMatrix& score_matrix, const EigenSystem& eig);

}  // namespace ftsp
