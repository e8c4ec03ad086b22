#include "ftsp/multivar.hpp"

#include <algorithm>

#include "linalg.hpp"

namespace ftsp {

namespace {

std::string describe_column(Index column, Index p, Index d, Index r) {
  if (column < p * d)
    return "lag " + std::to_string(column / d + 1) + " component " + std::to_string(column % d + 1);
  if (column < p * d + r) return "covariate " + std::to_string(column - p * d + 1);
  return "intercept";
}

VarModel fit_regression(const ScoreMatrix& scores, const Matrix* covariates, Index p,
                        const VarFitOptions& options) {
  const Index n = scores.rows();
  const Index d = scores.cols();
  const Index r = covariates ? covariates->cols() : 0;
  require(p >= 0, ErrorKind::out_of_range, "VAR order must be nonnegative");
  require(d >= 1, ErrorKind::dimension, "score matrix has no columns");
  require(scores.allFinite(), ErrorKind::non_finite, "scores contain non-finite values");
  if (covariates)
    require(covariates->rows() == n, ErrorKind::dimension,
            "covariates have " + std::to_string(covariates->rows()) + " rows, scores have " +
                std::to_string(n));

  const Index first = r > 0 ? std::max<Index>(p, 1) : p;  // 0-based first response row
  const Index rows = n - first;
  const Index cols = p * d + r + (options.intercept ? 1 : 0);
  require(rows > cols && rows >= 1, ErrorKind::insufficient_data,
          "VAR(" + std::to_string(p) + ") in dimension " + std::to_string(d) + " needs more than " +
              std::to_string(cols + first) + " observations, got " + std::to_string(n));

  const Matrix response = scores.bottomRows(rows);
  Matrix design(rows, cols);
  for (Index j = 1; j <= p; ++j) design.middleCols((j - 1) * d, d) = scores.middleRows(first - j, rows);
  if (r > 0) design.middleCols(p * d, r) = covariates->middleRows(first - 1, rows);
  if (options.intercept) design.col(cols - 1).setOnes();

  VarModel model;
  model.p = p;
  model.observations = rows;
  model.intercept = Vector::Zero(d);
  model.theta = Matrix::Zero(d, r);

  Matrix residual = response;
  if (cols > 0) {
    const auto solved = detail::solve_symmetric(design.transpose() * design,
                                                design.transpose() * response);
    if (solved.deficient_column)
      fail(ErrorKind::rank_deficient,
           "VAR(" + std::to_string(p) + ") design is rank deficient at " +
               describe_column(*solved.deficient_column, p, d, r) + " (dimension " +
               std::to_string(d) + ")");
    const Matrix& beta = solved.solution;  // cols x d
    for (Index j = 0; j < p; ++j) model.coeffs.push_back(beta.middleRows(j * d, d).transpose());
    if (r > 0) model.theta = beta.middleRows(p * d, r).transpose();
    if (options.intercept) model.intercept = beta.row(cols - 1).transpose();
    residual -= design * beta;
  }
  model.sigma_z = (residual.transpose() * residual) / static_cast<double>(rows);
  model.sigma_z = 0.5 * (model.sigma_z + model.sigma_z.transpose());
  return model;
}

Vector step(const VarModel& model, const std::vector<Vector>& recent) {
  // recent.back() is the newest observation.
  Vector next = model.intercept;
  const auto size = static_cast<Index>(recent.size());
  for (Index j = 1; j <= model.p; ++j) next += model.coeffs[j - 1] * recent[size - j];
  return next;
}

std::vector<Vector> seed_history(const VarModel& model, const Matrix& history) {
  require(history.cols() == model.dim(), ErrorKind::dimension,
          "history has " + std::to_string(history.cols()) + " columns, model dimension is " +
              std::to_string(model.dim()));
  require(history.rows() >= model.p, ErrorKind::insufficient_data,
          "prediction needs " + std::to_string(model.p) + " history rows, got " +
              std::to_string(history.rows()));
  std::vector<Vector> recent;
  for (Index k = history.rows() - model.p; k < history.rows(); ++k)
    recent.push_back(history.row(k).transpose());
  return recent;
}

}  // namespace

Matrix AcvfSequence::at(Index k) const {
  const Index lag = k < 0 ? -k : k;
  require(lag <= max_lag(), ErrorKind::out_of_range,
          "autocovariance lag " + std::to_string(k) + " beyond max lag " + std::to_string(max_lag()));
  return k < 0 ? Matrix(lags[lag].transpose()) : lags[lag];
}

AcvfSequence sample_acvf(const ScoreMatrix& scores, Index max_lag) {
  const Index n = scores.rows();
  require(max_lag >= 0 && max_lag < n, ErrorKind::out_of_range,
          "max lag " + std::to_string(max_lag) + " must be below sample size " + std::to_string(n));
  const Matrix centered = scores.rowwise() - scores.colwise().mean();
  AcvfSequence acvf;
  acvf.sample_size = n;
  for (Index k = 0; k <= max_lag; ++k)
    acvf.lags.push_back(centered.bottomRows(n - k).transpose() * centered.topRows(n - k) /
                        static_cast<double>(n));
  return acvf;
}

Matrix sample_cross_covariance(const Matrix& a, const Matrix& b, Index lag) {
  const Index n = a.rows();
  require(b.rows() == n, ErrorKind::dimension, "cross covariance: series lengths differ");
  const Index abs_lag = lag < 0 ? -lag : lag;
  require(abs_lag < n, ErrorKind::out_of_range, "cross covariance lag too large");
  const Matrix ac = a.rowwise() - a.colwise().mean();
  const Matrix bc = b.rowwise() - b.colwise().mean();
  const Index m = n - abs_lag;
  // Pairs (A_k, B_{k-lag}).
  if (lag >= 0) return ac.bottomRows(m).transpose() * bc.topRows(m) / static_cast<double>(n);
  return ac.topRows(m).transpose() * bc.bottomRows(m) / static_cast<double>(n);
}

VarModel fit_var_ols(const ScoreMatrix& scores, Index p, const VarFitOptions& options) {
  return fit_regression(scores, nullptr, p, options);
}

VarModel fit_varx_ols(const ScoreMatrix& scores, const Matrix& covariates, Index p,
                      const VarFitOptions& options) {
  return fit_regression(scores, &covariates, p, options);
}

Matrix predict_var_path(const VarModel& model, const Matrix& history, Index h) {
  require(h >= 1, ErrorKind::out_of_range, "horizon must be at least 1");
  require(model.covariate_dim() == 0, ErrorKind::unsupported,
          "models with covariates predict one step ahead only");
  auto recent = seed_history(model, history);
  Matrix path(h, model.dim());
  for (Index s = 0; s < h; ++s) {
    Vector next = step(model, recent);
    path.row(s) = next.transpose();
    if (model.p > 0) {
      recent.erase(recent.begin());
      recent.push_back(std::move(next));
    }
  }
  return path;
}

Vector predict_var(const VarModel& model, const Matrix& history, Index h) {
  return predict_var_path(model, history, h).row(h - 1).transpose();
}

Vector predict_var(const VarModel& model, const Matrix& history, const Vector& covariate) {
  require(covariate.size() == model.covariate_dim(), ErrorKind::dimension,
          "covariate vector has length " + std::to_string(covariate.size()) + ", model expects " +
              std::to_string(model.covariate_dim()));
  const auto recent = seed_history(model, history);
  Vector next = step(model, recent);
  if (model.covariate_dim() > 0) next += model.theta * covariate;
  return next;
}

BlpCoefficients solve_blp_with_covariates(const AcvfSequence& acvf, std::span<const Matrix> cross,
                                          const Matrix& gamma_rr, Index m) {
  const Index d = acvf.dim();
  const Index r = gamma_rr.rows();
  require(m >= 1 && m <= acvf.max_lag(), ErrorKind::out_of_range,
          "projection depth " + std::to_string(m) + " needs autocovariances up to that lag");
  require(gamma_rr.cols() == r, ErrorKind::dimension, "Gamma_RR must be square");
  require(static_cast<Index>(cross.size()) == m + 1, ErrorKind::dimension,
          "expected " + std::to_string(m + 1) + " cross-covariance blocks Gamma_YR(1-m..1)");
  // cross[i + m - 1] = Gamma_YR(i)
  auto gamma_yr = [&](Index i) -> const Matrix& { return cross[i + m - 1]; };
  for (const auto& block : cross)
    require(block.rows() == d && block.cols() == r, ErrorKind::dimension,
            "cross-covariance blocks must be d x r");

  const Index size = m * d + r;
  Matrix big(size, size);
  Matrix rhs(d, size);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) big.block(i * d, j * d, d, d) = acvf.at(j - i);
    if (r > 0) {
      big.block(i * d, m * d, d, r) = gamma_yr(-i);
      big.block(m * d, i * d, r, d) = gamma_yr(-i).transpose();
    }
    rhs.middleCols(i * d, d) = acvf.at(i + 1);
  }
  if (r > 0) {
    big.bottomRightCorner(r, r) = gamma_rr;
    rhs.rightCols(r) = gamma_yr(1);
  }

  const auto solved = detail::solve_symmetric(0.5 * (big + big.transpose()), rhs.transpose());
  if (solved.deficient_column)
    fail(ErrorKind::singular, "block covariance matrix is singular at row " +
                                  std::to_string(*solved.deficient_column + 1) +
                                  "; reduce the projection depth or covariate dimension");
  const Matrix coeffs = solved.solution.transpose();  // d x size
  BlpCoefficients out;
  for (Index i = 0; i < m; ++i) out.phi.push_back(coeffs.middleCols(i * d, d));
  out.theta = coeffs.rightCols(r);
  return out;
}

InnovationsState innovations(const AcvfSequence& acvf, Index m) {
  require(m >= 0 && m <= acvf.max_lag(), ErrorKind::out_of_range,
          "innovations horizon " + std::to_string(m) + " exceeds available lags " +
              std::to_string(acvf.max_lag()));
  const Index d = acvf.dim();
  InnovationsState state;
  state.horizon = m;
  state.theta.resize(m + 1);
  state.errors.push_back(acvf.at(0));

  std::vector<Matrix> error_inverse;
  auto invert = [&](Index k) {
    const auto solved = detail::solve_symmetric(state.errors[k], Matrix::Identity(d, d));
    if (solved.deficient_column)
      fail(ErrorKind::degenerate, "one-step error covariance V_" + std::to_string(k) +
                                      " is singular; innovations recursion cannot continue");
    error_inverse.push_back(solved.solution);
  };
  invert(0);

  for (Index n = 1; n <= m; ++n) {
    auto& row = state.theta[n];
    row.assign(n, Matrix::Zero(d, d));
    for (Index k = 0; k < n; ++k) {
      Matrix s = acvf.at(n - k);
      for (Index j = 0; j < k; ++j)
        s -= row[n - j - 1] * state.errors[j] * state.theta[k][k - j - 1].transpose();
      row[n - k - 1] = s * error_inverse[k];
    }
    Matrix v = acvf.at(0);
    for (Index j = 0; j < n; ++j)
      v -= row[n - j - 1] * state.errors[j] * row[n - j - 1].transpose();
    state.errors.push_back(0.5 * (v + v.transpose()));
    if (n < m) invert(n);
  }
  return state;
}

Vector innovations_predict(const InnovationsState& state, const Matrix& window) {
  const Index m = state.horizon;
  require(window.rows() == m, ErrorKind::dimension,
          "innovations window must hold exactly " + std::to_string(m) + " observations");
  const Index d = state.errors.front().rows();
  require(window.cols() == d, ErrorKind::dimension, "window dimension mismatch");
  // predicted[k] is the prediction of observation k (0-based) from observations < k.
  std::vector<Vector> predicted(m + 1, Vector::Zero(d));
  for (Index k = 1; k <= m; ++k)
    for (Index j = 1; j <= k; ++j)
      predicted[k] += state.coefficient(k, j) *
                      (window.row(k - j).transpose() - predicted[k - j]);
  return predicted[m];
}

}  // namespace ftsp
