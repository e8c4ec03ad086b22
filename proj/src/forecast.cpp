#include "ftsp/forecast.hpp"

#include <algorithm>
#include <cmath>

namespace ftsp {

namespace {

constexpr double kInverseTolerance = 1e-12;

VarModel empty_model(Index d) {
  VarModel model;
  model.sigma_z = Matrix::Zero(d, d);
  model.intercept = Vector::Zero(d);
  model.theta = Matrix::Zero(d, 0);
  return model;
}

Predictor mean_only(Method method, const EigenSystem& eig) {
  Predictor pred;
  pred.method = method;
  pred.eig = truncate(eig, 0);
  pred.model = empty_model(0);
  return pred;
}

Index clamp_dimension(const FunctionalDataset& data, Index d_max) {
  return std::min({d_max, data.size() - 1, data.grid().size()});
}

VarModel bosq_model(const EigenSystem& eig, const ScoreMatrix& y) {
  const Index n = y.rows();
  const Index d = eig.dim();
  require(eig.eigenvalues(d - 1) > kInverseTolerance * eig.eigenvalues(0), ErrorKind::ill_conditioned,
          "Bosq estimator: eigenvalue " + std::to_string(d) +
              " is too small to invert relative to the leading eigenvalue");
  const Matrix cross = y.bottomRows(n - 1).transpose() * y.topRows(n - 1) / static_cast<double>(n - 1);
  VarModel model = empty_model(d);
  model.p = 1;
  model.coeffs.push_back(cross * eig.eigenvalues.cwiseInverse().asDiagonal());
  const Matrix residual = y.bottomRows(n - 1) - y.topRows(n - 1) * model.coeffs[0].transpose();
  model.sigma_z = residual.transpose() * residual / static_cast<double>(n - 1);
  model.observations = n - 1;
  return model;
}

ForecastResult make_result(const Predictor& pred, Matrix score_rows) {
  ForecastResult result;
  result.method = pred.method;
  result.p = pred.p();
  result.d = pred.d();
  result.grid = pred.eig.grid;
  result.curves = pred.to_curves(score_rows);
  result.scores = std::move(score_rows);
  result.table = pred.table;
  return result;
}

Matrix history_scores(const Predictor& pred, const Matrix& history) {
  const Index need = pred.memory();
  require(history.rows() >= need, ErrorKind::insufficient_data,
          "predictor needs " + std::to_string(need) + " past curves, got " +
              std::to_string(history.rows()));
  return project(history.bottomRows(need), pred.eig);
}

}  // namespace

std::string_view method_name(Method method) {
  switch (method) {
    case Method::ffpe: return "ffpe";
    case Method::fixed: return "fixed";
    case Method::bosq: return "bosq";
    case Method::scalar: return "scalar";
    case Method::covariate: return "covariate";
    case Method::innovations: return "innovations";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// CovariateEncoder

CovariateEncoder CovariateEncoder::fit(const std::vector<CovariateSeries>& covariates,
                                       const CovariateOptions& options) {
  CovariateEncoder enc;
  std::size_t functional_seen = 0;
  for (const auto& series : covariates) {
    Block block;
    if (const auto* curves = std::get_if<FunctionalDataset>(&series)) {
      const Index cap = std::min(curves->size() - 1, curves->grid().size());
      const EigenSystem full = eigensystem(*curves, cap);
      Index dim = dimension_for_pve(full, options.pve_threshold);
      if (functional_seen < options.functional_dims.size() &&
          options.functional_dims[functional_seen] > 0)
        dim = std::min(options.functional_dims[functional_seen], cap);
      ++functional_seen;
      block.eig = truncate(full, dim);
      enc.dim_ += dim;
    } else {
      const auto& numeric = std::get<Matrix>(series);
      require(numeric.allFinite(), ErrorKind::non_finite, "numeric covariate has non-finite values");
      std::vector<double> means;
      for (Index c = 0; c < numeric.cols(); ++c) {
        const double mean = numeric.col(c).mean();
        const double spread = (numeric.col(c).array() - mean).abs().maxCoeff();
        if (spread > 1e-12 * std::max(1.0, std::abs(mean))) {
          block.columns.push_back(c);
          means.push_back(mean);
        }
      }
      block.means = Eigen::Map<Vector>(means.data(), static_cast<Index>(means.size()));
      enc.dim_ += static_cast<Index>(block.columns.size());
    }
    enc.blocks_.push_back(std::move(block));
  }
  return enc;
}

Matrix CovariateEncoder::encode(const std::vector<CovariateSeries>& covariates) const {
  require(covariates.size() == blocks_.size(), ErrorKind::dimension,
          "covariate count differs from the fitted encoder");
  Index n = -1;
  for (const auto& series : covariates) {
    const Index rows = std::visit(
        [](const auto& s) -> Index {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, FunctionalDataset>)
            return s.size();
          else
            return s.rows();
        },
        series);
    require(n < 0 || rows == n, ErrorKind::dimension, "covariate series lengths differ");
    n = rows;
  }
  Matrix out(std::max<Index>(n, 0), dim_);
  Index col = 0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& block = blocks_[b];
    if (block.eig) {
      const auto& curves = std::get<FunctionalDataset>(covariates[b]);
      const Index w = block.eig->dim();
      if (w > 0) out.middleCols(col, w) = project(curves.values(), *block.eig);
      col += w;
    } else {
      const auto& numeric = std::get<Matrix>(covariates[b]);
      for (std::size_t c = 0; c < block.columns.size(); ++c)
        out.col(col++) = numeric.col(block.columns[c]).array() - block.means(static_cast<Index>(c));
    }
  }
  return out;
}

Vector CovariateEncoder::encode_row(const std::vector<CovariateSeries>& covariates, Index k) const {
  require(covariates.size() == blocks_.size(), ErrorKind::dimension,
          "covariate count differs from the fitted encoder");
  Vector out(dim_);
  Index col = 0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& block = blocks_[b];
    if (block.eig) {
      const auto& curves = std::get<FunctionalDataset>(covariates[b]);
      const Index w = block.eig->dim();
      if (w > 0) out.segment(col, w) = project(curves.values().row(k), *block.eig).transpose();
      col += w;
    } else {
      const auto& numeric = std::get<Matrix>(covariates[b]);
      for (std::size_t c = 0; c < block.columns.size(); ++c)
        out(col++) = numeric(k, block.columns[c]) - block.means(static_cast<Index>(c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predictor

Matrix Predictor::predict_scores(const Matrix& history, Index h) const {
  require(model.covariate_dim() == 0, ErrorKind::unsupported,
          "this predictor needs the covariate vector; use the covariate overload");
  const Matrix past = history_scores(*this, history);
  if (innovations) {
    require(h == 1, ErrorKind::unsupported, "innovations predictor supports h = 1 only");
    const Matrix window = past.rowwise() - score_mean.transpose();
    return (innovations_predict(*innovations, window) + score_mean).transpose();
  }
  return predict_var_path(model, past, h);
}

Vector Predictor::predict_scores(const Matrix& history, const Vector& covariate) const {
  const Matrix past = history_scores(*this, history);
  return predict_var(model, past, covariate);
}

Matrix Predictor::to_curves(const Matrix& score_rows) const {
  Matrix curves = score_rows * eig.eigenfunctions;
  curves.rowwise() += eig.mean.transpose();
  return curves;
}

// ---------------------------------------------------------------------------
// Fitting

Predictor fit_fts(const FunctionalDataset& data, const OrderConfig& config) {
  if (const auto* fixed = std::get_if<FixedOrder>(&config)) {
    const EigenSystem eig = eigensystem(data, fixed->d);
    if (eig.numerical_rank() == 0) return mean_only(Method::fixed, eig);
    Predictor pred;
    pred.method = Method::fixed;
    pred.model = fit_var_ols(scores(data, eig), fixed->p);
    pred.eig = eig;
    return pred;
  }
  const auto& automatic = std::get<AutoOrder>(config);
  const Index d_max = clamp_dimension(data, automatic.d_max);
  const EigenSystem full = eigensystem(data, d_max);
  if (full.numerical_rank() == 0) return mean_only(Method::ffpe, full);
  const ScoreMatrix y = scores(data, full);
  Predictor pred;
  pred.method = Method::ffpe;
  pred.table = select_pd(full, y, automatic.p_max, d_max);
  const Index d = pred.table->best_d;
  pred.eig = truncate(full, d);
  pred.model = fit_var_ols(y.leftCols(d), pred.table->best_p);
  return pred;
}

Predictor fit_bosq(const FunctionalDataset& data, Index d) {
  require(data.size() >= 2, ErrorKind::insufficient_data, "Bosq predictor needs n >= 2");
  Predictor pred;
  pred.method = Method::bosq;
  pred.eig = eigensystem(data, d);
  pred.model = bosq_model(pred.eig, scores(data, pred.eig));
  return pred;
}

Predictor fit_scalar(const FunctionalDataset& data, Index d, Index p) {
  Predictor pred;
  pred.method = Method::scalar;
  pred.eig = eigensystem(data, d);
  const ScoreMatrix y = scores(data, pred.eig);
  VarModel model = empty_model(d);
  model.p = p;
  model.coeffs.assign(p, Matrix::Zero(d, d));
  for (Index l = 0; l < d; ++l) {
    const VarModel single = fit_var_ols(y.col(l), p);
    for (Index j = 0; j < p; ++j) model.coeffs[j](l, l) = single.coeffs[j](0, 0);
  }
  const Index rows = y.rows() - p;
  Matrix residual = y.bottomRows(rows);
  for (Index j = 1; j <= p; ++j)
    residual -= y.middleRows(p - j, rows) * model.coeffs[j - 1].transpose();
  model.sigma_z = residual.transpose() * residual / static_cast<double>(rows);
  model.observations = rows;
  pred.model = std::move(model);
  return pred;
}

Predictor fit_with_covariates(const FunctionalDataset& data,
                              const std::vector<CovariateSeries>& covariates,
                              const OrderConfig& config, const CovariateOptions& options) {
  CovariateEncoder encoder = CovariateEncoder::fit(covariates, options);
  const Matrix regressors = encoder.encode(covariates);
  const Index r = encoder.dim();
  if (!covariates.empty())
    require(regressors.rows() == data.size(), ErrorKind::dimension,
            "covariates have " + std::to_string(regressors.rows()) + " rows, data has " +
                std::to_string(data.size()) + " curves");

  Predictor pred;
  pred.method = Method::covariate;
  Index p = 0;
  if (const auto* fixed = std::get_if<FixedOrder>(&config)) {
    pred.eig = eigensystem(data, fixed->d);
    p = fixed->p;
  } else {
    const auto& automatic = std::get<AutoOrder>(config);
    const Index d_max = clamp_dimension(data, automatic.d_max);
    const EigenSystem full = eigensystem(data, d_max);
    if (full.numerical_rank() == 0) {
      Predictor trivial = mean_only(Method::covariate, full);
      trivial.model.theta = Matrix::Zero(0, r);
      trivial.encoder = std::move(encoder);
      return trivial;
    }
    pred.table = select_pd(full, scores(data, full), automatic.p_max, d_max,
                           r > 0 ? std::optional<Matrix>(regressors) : std::nullopt);
    pred.eig = truncate(full, pred.table->best_d);
    p = pred.table->best_p;
  }
  const ScoreMatrix y = scores(data, pred.eig);

  if (r == 0) {
    pred.model = fit_var_ols(y, p);
  } else if (options.fit == CovariateOptions::Fit::regression) {
    pred.model = fit_varx_ols(y, regressors, p);
  } else {
    const Index m = std::max<Index>(p, 1);
    const AcvfSequence acvf = sample_acvf(y, m);
    std::vector<Matrix> cross;
    for (Index i = 1 - m; i <= 1; ++i) cross.push_back(sample_cross_covariance(y, regressors, i));
    const BlpCoefficients blp =
        solve_blp_with_covariates(acvf, cross, sample_cross_covariance(regressors, regressors, 0), m);
    VarModel model = empty_model(y.cols());
    model.p = m;
    model.coeffs = blp.phi;
    model.theta = blp.theta;
    const Index rows = y.rows() - m;
    Matrix residual = y.bottomRows(rows) - regressors.middleRows(m - 1, rows) * blp.theta.transpose();
    for (Index j = 1; j <= m; ++j)
      residual -= y.middleRows(m - j, rows) * blp.phi[j - 1].transpose();
    model.sigma_z = residual.transpose() * residual / static_cast<double>(rows);
    model.observations = rows;
    pred.model = std::move(model);
  }
  pred.encoder = std::move(encoder);
  return pred;
}

Predictor fit_innovations(const FunctionalDataset& data, Index d, Index m) {
  require(m >= 1, ErrorKind::out_of_range, "innovations predictor needs m >= 1");
  Predictor pred;
  pred.method = Method::innovations;
  pred.eig = eigensystem(data, d);
  const ScoreMatrix y = scores(data, pred.eig);
  pred.score_mean = y.colwise().mean().transpose();
  pred.innovations = innovations(sample_acvf(y, m), m);
  pred.model = empty_model(d);
  return pred;
}

// ---------------------------------------------------------------------------
// End-to-end predictions

ForecastResult predict_fts(const FunctionalDataset& data, Index h, const OrderConfig& config) {
  const Predictor pred = fit_fts(data, config);
  return make_result(pred, pred.predict_scores(data.values(), h));
}

ForecastResult bosq_predict(const FunctionalDataset& data, Index d) {
  const Predictor pred = fit_bosq(data, d);
  return make_result(pred, pred.predict_scores(data.values(), 1));
}

ForecastResult scalar_predict(const FunctionalDataset& data, Index d, Index p) {
  const Predictor pred = fit_scalar(data, d, p);
  return make_result(pred, pred.predict_scores(data.values(), 1));
}

ForecastResult predict_with_covariates(const FunctionalDataset& data,
                                       const std::vector<CovariateSeries>& covariates,
                                       const OrderConfig& config, const CovariateOptions& options) {
  const Predictor pred = fit_with_covariates(data, covariates, config, options);
  const Vector latest = pred.encoder->dim() > 0
                            ? pred.encoder->encode_row(covariates, data.size() - 1)
                            : Vector::Zero(0);
  const Vector next = pred.predict_scores(data.values(), latest);
  return make_result(pred, next.transpose());
}

ForecastResult innovations_forecast(const FunctionalDataset& data, Index d, Index m) {
  const Predictor pred = fit_innovations(data, d, m);
  return make_result(pred, pred.predict_scores(data.values(), 1));
}

EquivalenceGap equivalence_gap(const FunctionalDataset& data, Index d) {
  const Index n = data.size();
  require(n >= 3, ErrorKind::insufficient_data, "equivalence gap needs n >= 3");
  const EigenSystem eig = eigensystem(data, d);
  const ScoreMatrix y = scores(data, eig);
  const VarModel var = fit_var_ols(y, 1);
  const VarModel bosq = bosq_model(eig, y);
  const Vector last = y.row(n - 1).transpose();

  EquivalenceGap out;
  out.var_prediction = eig.mean + eig.eigenfunctions.transpose() * (var.coeffs[0] * last);
  out.bosq_prediction = eig.mean + eig.eigenfunctions.transpose() * (bosq.coeffs[0] * last);
  out.gap = l2_norm(out.var_prediction - out.bosq_prediction, eig.grid);
  out.gamma_hat = y.topRows(n - 1).transpose() * y.topRows(n - 1) / static_cast<double>(n - 1);
  out.gamma_tilde = eig.eigenvalues.asDiagonal();
  return out;
}

nlohmann::json to_json(const ForecastResult& result) {
  auto row = [](const auto& m, Index r) {
    std::vector<double> v(static_cast<std::size_t>(m.cols()));
    for (Index c = 0; c < m.cols(); ++c) v[static_cast<std::size_t>(c)] = m(r, c);
    return v;
  };
  nlohmann::json j;
  j["method"] = method_name(result.method);
  j["p"] = result.p;
  j["d"] = result.d;
  j["horizon"] = result.horizon();
  j["scores"] = row(result.scores, result.scores.rows() - 1);
  j["curve"] = row(result.curves, result.curves.rows() - 1);
  if (result.horizon() > 1) {
    j["path_scores"] = nlohmann::json::array();
    j["path_curves"] = nlohmann::json::array();
    for (Index s = 0; s < result.horizon(); ++s) {
      j["path_scores"].push_back(row(result.scores, s));
      j["path_curves"].push_back(row(result.curves, s));
    }
  }
  return j;
}

}  // namespace ftsp
