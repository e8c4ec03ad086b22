#pragma once

#include <span>
#include <vector>

#include "ftsp/fpca.hpp"

namespace ftsp {

/// Sample autocovariances Gamma(k) = (1/n) sum_j (Y_{j+k} - Ybar)(Y_j - Ybar)^T, k = 0..max_lag.
struct AcvfSequence {
  std::vector<Matrix> lags;
  Index sample_size = 0;

  Index max_lag() const noexcept { return static_cast<Index>(lags.size()) - 1; }
  Index dim() const noexcept { return lags.empty() ? 0 : lags.front().rows(); }
  /// Gamma(k) for any |k| <= max_lag, with Gamma(-k) = Gamma(k)^T.
  Matrix at(Index k) const;
};

/// Y_k = c + Phi_1 Y_{k-1} + ... + Phi_p Y_{k-p} + Theta R_{k-1} + Z_k.
struct VarModel {
  Index p = 0;
  std::vector<Matrix> coeffs;  // Phi_1..Phi_p, each d x d
  Matrix sigma_z;              // d x d innovation covariance
  Vector intercept;            // zero unless fitted with an intercept
  Matrix theta;                // d x r covariate loadings (r = 0 without covariates)
  Index observations = 0;      // regression rows used in the fit

  Index dim() const noexcept { return sigma_z.rows(); }
  Index covariate_dim() const noexcept { return theta.cols(); }
};

struct VarFitOptions {
  bool intercept = false;
};

/// Multivariate innovations recursion: theta[k][j - 1] holds Theta_{k,j} and
/// errors[k] the one-step error covariance V_k.
struct InnovationsState {
  Index horizon = 0;
  std::vector<std::vector<Matrix>> theta;
  std::vector<Matrix> errors;

  const Matrix& coefficient(Index k, Index j) const { return theta[k][j - 1]; }
};

struct BlpCoefficients {
  std::vector<Matrix> phi;  // Phi_1..Phi_m
  Matrix theta;             // d x r
};

AcvfSequence sample_acvf(const ScoreMatrix& scores, Index max_lag);

/// Cov(A_k, B_{k-lag}) estimated with divisor n; lag may be negative.
Matrix sample_cross_covariance(const Matrix& a, const Matrix& b, Index lag);

/// Least squares VAR(p) on the rows of `scores` (oldest first). Scores are taken
/// as centered unless an intercept is requested.
VarModel fit_var_ols(const ScoreMatrix& scores, Index p, const VarFitOptions& options = {});

/// VARX(p): as fit_var_ols with covariate row k-1 appended to the regressors of row k.
VarModel fit_varx_ols(const ScoreMatrix& scores, const Matrix& covariates, Index p,
                      const VarFitOptions& options = {});

/// Iterated h-step prediction from the last rows of `history` (oldest first).
Vector predict_var(const VarModel& model, const Matrix& history, Index h);

/// One-step prediction with the covariate vector R_n observed alongside the last history row.
Vector predict_var(const VarModel& model, const Matrix& history, const Vector& covariate);

/// Predictions for steps 1..h as rows.
Matrix predict_var_path(const VarModel& model, const Matrix& history, Index h);

/// Best linear predictor coefficients from population-form second moments.
/// `cross` holds Gamma_YR(i) for i = 1-m, ..., 0, 1 (m + 1 blocks, d x r each).
BlpCoefficients solve_blp_with_covariates(const AcvfSequence& acvf, std::span<const Matrix> cross,
                                          const Matrix& gamma_rr, Index m);

InnovationsState innovations(const AcvfSequence& acvf, Index m);

/// One-step predictor of the observation following `window` (m rows, oldest
/// first, on the centered scale of the autocovariances).
Vector innovations_predict(const InnovationsState& state, const Matrix& window);

}  // namespace ftsp
