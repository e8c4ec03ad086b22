#pragma once

#include <optional>

#include "ftsp/types.hpp"

namespace ftsp::detail {

inline constexpr double kPivotTolerance = 1e-12;

struct SymmetricSolve {
  Matrix solution;
  /// Original column index of the first pivot that fell below tolerance.
  std::optional<Index> deficient_column;
};

/// Solves gram * X = rhs for symmetric positive semidefinite `gram`. The system
/// is Jacobi-scaled to unit diagonal before a pivoted LDLT, and any pivot below
/// kPivotTolerance times the largest one is reported instead of solved around.
inline SymmetricSolve solve_symmetric(const Matrix& gram, const Matrix& rhs) {
  const Index k = gram.rows();
  SymmetricSolve out;
  if (k == 0) {
    out.solution = Matrix::Zero(0, rhs.cols());
    return out;
  }
  const Vector diag = gram.diagonal();
  double max_diag = diag.cwiseAbs().maxCoeff();
  for (Index i = 0; i < k; ++i) {
    if (!(diag(i) > kPivotTolerance * max_diag) || !(diag(i) > 0.0)) {
      out.deficient_column = i;
      return out;
    }
  }
  const Vector scale = diag.cwiseSqrt().cwiseInverse();
  const Matrix scaled = scale.asDiagonal() * gram * scale.asDiagonal();
  Eigen::LDLT<Matrix> ldlt(scaled);
  const Vector pivots = ldlt.vectorD();
  const double max_pivot = pivots.cwiseAbs().maxCoeff();
  for (Index i = 0; i < k; ++i) {
    if (!(pivots(i) > kPivotTolerance * max_pivot)) {
      Eigen::PermutationMatrix<Eigen::Dynamic> perm(ldlt.transpositionsP());
      Index original = i;
      for (Index j = 0; j < k; ++j)
        if (perm.indices()(j) == i) original = j;
      out.deficient_column = original;
      return out;
    }
  }
  out.solution = scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * rhs);
  return out;
}

}  // namespace ftsp::detail
