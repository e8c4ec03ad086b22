#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "ftsp/multivar.hpp"
#include "ftsp/selection.hpp"
#include "json.hpp"

namespace ftsp {

enum class Method { ffpe, fixed, bosq, scalar, covariate, innovations };

std::string_view method_name(Method method);

/// Joint (p, d) selection by fFPE over [0, p_max] x [1, d_max].
struct AutoOrder {
  Index p_max = 5;
  Index d_max = 10;
};

struct FixedOrder {
  Index p = 1;
  Index d = 3;
};

using OrderConfig = std::variant<AutoOrder, FixedOrder>;

/// A covariate observed alongside each curve: functional (own FPCA) or numeric (n x q).
using CovariateSeries = std::variant<FunctionalDataset, Matrix>;

struct CovariateOptions {
  enum class Fit { regression, population };

  /// Default covariate FPCA dimension: smallest d' reaching this proportion of variance.
  double pve_threshold = 0.9;
  /// Per functional covariate (in order of appearance) d' override; 0 keeps the PVE rule.
  std::vector<Index> functional_dims;
  Fit fit = Fit::regression;
};

/// Maps raw covariate series to the centered regressor vectors R_k.
class CovariateEncoder {
 public:
  static CovariateEncoder fit(const std::vector<CovariateSeries>& covariates,
                              const CovariateOptions& options);

  Index dim() const noexcept { return dim_; }
  /// All rows as an n x r matrix.
  Matrix encode(const std::vector<CovariateSeries>& covariates) const;
  /// Row k only.
  Vector encode_row(const std::vector<CovariateSeries>& covariates, Index k) const;

 private:
  struct Block {
    std::optional<EigenSystem> eig;  // functional covariate
    std::vector<Index> columns;      // numeric covariate: retained (non-zero) columns
    Vector means;                    // numeric covariate: column means of retained columns
  };
  std::vector<Block> blocks_;
  Index dim_ = 0;
};

/// A fitted curve predictor: eigensystem plus score dynamics.
struct Predictor {
  Method method = Method::fixed;
  EigenSystem eig;  // truncated to the working dimension d
  VarModel model;   // Bosq and scalar predictors are expressed as restricted VAR models
  std::optional<InnovationsState> innovations;
  Vector score_mean;  // innovations only: mean of the training scores
  std::optional<FfpeTable> table;
  std::optional<CovariateEncoder> encoder;

  Index p() const noexcept { return innovations ? innovations->horizon : model.p; }
  Index d() const noexcept { return eig.dim(); }
  /// History rows the predictor consumes.
  Index memory() const noexcept { return p(); }

  /// Score predictions for steps 1..h (rows) from curve history, oldest row first.
  Matrix predict_scores(const Matrix& history, Index h) const;
  /// One-step score prediction given the covariate vector R aligned with the last history row.
  Vector predict_scores(const Matrix& history, const Vector& covariate) const;
  /// Curves mu + sum_l s_l v_l for each row of `score_rows`.
  Matrix to_curves(const Matrix& score_rows) const;
};

struct ForecastResult {
  Method method = Method::fixed;
  Index p = 0;
  Index d = 0;
  Grid grid{2};
  Matrix scores;  // h x d, row s = prediction for step s + 1
  Matrix curves;  // h x T
  std::optional<FfpeTable> table;

  Index horizon() const noexcept { return curves.rows(); }
  Vector curve() const { return curves.row(curves.rows() - 1).transpose(); }
  Vector score_vector() const { return scores.row(scores.rows() - 1).transpose(); }
};

Predictor fit_fts(const FunctionalDataset& data, const OrderConfig& config);
Predictor fit_bosq(const FunctionalDataset& data, Index d);
Predictor fit_scalar(const FunctionalDataset& data, Index d, Index p);
Predictor fit_with_covariates(const FunctionalDataset& data,
                              const std::vector<CovariateSeries>& covariates,
                              const OrderConfig& config, const CovariateOptions& options = {});
Predictor fit_innovations(const FunctionalDataset& data, Index d, Index m);

ForecastResult predict_fts(const FunctionalDataset& data, Index h, const OrderConfig& config);
ForecastResult bosq_predict(const FunctionalDataset& data, Index d);
ForecastResult scalar_predict(const FunctionalDataset& data, Index d, Index p);
ForecastResult predict_with_covariates(const FunctionalDataset& data,
                                       const std::vector<CovariateSeries>& covariates,
                                       const OrderConfig& config,
                                       const CovariateOptions& options = {});
ForecastResult innovations_forecast(const FunctionalDataset& data, Index d, Index m);

/// VAR(1) versus Bosq one-step predictions at a common dimension.
struct EquivalenceGap {
  double gap = 0.0;          // || Yhat_{n+1} - Ytilde_{n+1} ||
  Matrix gamma_hat;          // OLS Gram (1/(n-1)) sum_{k<n} y_k y_k^T
  Matrix gamma_tilde;        // diag(lambda)
  Vector var_prediction;     // curve
  Vector bosq_prediction;    // curve
};

EquivalenceGap equivalence_gap(const FunctionalDataset& data, Index d);

nlohmann::json to_json(const ForecastResult& result);

}  // namespace ftsp
