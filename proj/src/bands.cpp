#include "ftsp/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "csv.hpp"
#include "ftsp/fpca.hpp"
#include "ftsp/multivar.hpp"

namespace ftsp {

namespace {

constexpr double kGammaFloor = 1e-12;

std::vector<bool> active_points(const Vector& gamma) {
  const double cutoff = kGammaFloor * (gamma.size() ? gamma.maxCoeff() : 0.0);
  std::vector<bool> active(static_cast<std::size_t>(gamma.size()));
  for (Index t = 0; t < gamma.size(); ++t) active[static_cast<std::size_t>(t)] = gamma(t) > cutoff && gamma(t) > 0.0;
  return active;
}

double order_statistic(std::vector<double> values, Index rank) {
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[static_cast<std::size_t>(rank - 1)];
}

}  // namespace

bool PredictionBand::covers(const Vector& residual) const {
  require(residual.size() == gamma.size(), ErrorKind::dimension, "band and residual lengths differ");
  const auto active = active_points(gamma);
  for (Index t = 0; t < gamma.size(); ++t) {
    if (!active[static_cast<std::size_t>(t)]) continue;
    if (-residual(t) / gamma(t) > xi_lower || residual(t) / gamma(t) > xi_upper) return false;
  }
  return true;
}

Index default_warmup(Index n, Index d, Index p) { return std::max({p, 10 * d, n / 4}); }

FunctionalDataset rolling_residuals(const FunctionalDataset& data, Index d, Index p, Index warmup) {
  const Index n = data.size();
  require(warmup >= std::max(p, 10 * d), ErrorKind::out_of_range,
          "warm-up L = " + std::to_string(warmup) + " must be at least max(p, 10 d) = " +
              std::to_string(std::max(p, 10 * d)));
  require(warmup < n - 1, ErrorKind::out_of_range,
          "warm-up L = " + std::to_string(warmup) + " must be below n - 1 = " + std::to_string(n - 1));
  const EigenSystem eig = eigensystem(data, d);
  const ScoreMatrix y = scores(data, eig);
  Matrix residuals(n - warmup, data.grid().size());
  for (Index k = warmup; k < n; ++k) {
    const VarModel model = fit_var_ols(y.topRows(k), p);
    const Vector next = predict_var(model, y.middleRows(k - p, p), 1);
    const Vector curve = eig.mean + eig.eigenfunctions.transpose() * next;
    residuals.row(k - warmup) = data.values().row(k) - curve.transpose();
  }
  return FunctionalDataset(data.grid(), std::move(residuals));
}

PredictionBand prediction_band(const FunctionalDataset& residuals, double alpha, bool symmetric) {
  const Index m = residuals.size();
  require(m >= 10, ErrorKind::insufficient_data,
          "prediction band needs at least 10 residual curves, got " + std::to_string(m));
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::out_of_range, "alpha must lie in (0, 1)");
  const Matrix& e = residuals.values();

  PredictionBand band;
  band.grid = residuals.grid();
  band.alpha = alpha;
  band.residual_count = m;
  const Matrix centered = e.rowwise() - e.colwise().mean();
  band.gamma = (centered.colwise().squaredNorm() / static_cast<double>(m - 1)).cwiseSqrt().transpose();
  const auto active = active_points(band.gamma);
  if (std::none_of(active.begin(), active.end(), [](bool a) { return a; })) {
    require(e.cwiseAbs().maxCoeff() == 0.0, ErrorKind::degenerate,
            "residuals vary nowhere yet are not all zero");
    return band;
  }

  std::vector<double> below(static_cast<std::size_t>(m)), above(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Index t = 0; t < e.cols(); ++t) {
      if (!active[static_cast<std::size_t>(t)]) continue;
      lo = std::max(lo, -e(k, t) / band.gamma(t));
      hi = std::max(hi, e(k, t) / band.gamma(t));
    }
    below[static_cast<std::size_t>(k)] = lo;
    above[static_cast<std::size_t>(k)] = hi;
  }
  const auto rank = static_cast<Index>(std::ceil(alpha * static_cast<double>(m) - 1e-12));

  if (symmetric) {
    std::vector<double> sup(below.size());
    for (std::size_t k = 0; k < sup.size(); ++k) sup[k] = std::max({below[k], above[k], 0.0});
    band.xi_lower = band.xi_upper = order_statistic(std::move(sup), rank);
    return band;
  }

  const double q_lo = std::max(order_statistic(below, rank), 0.0);
  const double q_hi = std::max(order_statistic(above, rank), 0.0);
  auto ratio = [](double stat, double q) {
    if (stat <= 0.0) return 0.0;
    return q > 0.0 ? stat / q : std::numeric_limits<double>::infinity();
  };
  std::vector<double> scale(below.size());
  for (std::size_t k = 0; k < scale.size(); ++k)
    scale[k] = std::max(ratio(below[k], q_lo), ratio(above[k], q_hi));
  const double s = order_statistic(scale, rank);
  band.xi_lower = s * q_lo;
  band.xi_upper = s * q_hi;
  for (std::size_t k = 0; k < scale.size(); ++k) {
    if (scale[k] > s) continue;
    band.xi_lower = std::max(band.xi_lower, below[k]);
    band.xi_upper = std::max(band.xi_upper, above[k]);
  }
  return band;
}

double coverage(const PredictionBand& band, const FunctionalDataset& residuals) {
  Index inside = 0;
  for (Index k = 0; k < residuals.size(); ++k)
    if (band.covers(residuals.curve(k))) ++inside;
  return static_cast<double>(inside) / static_cast<double>(residuals.size());
}

void write_band_csv(std::ostream& out, const PredictionBand& band) {
  out << "t,gamma,lower_offset,upper_offset\n";
  for (Index t = 0; t < band.gamma.size(); ++t)
    out << csv::format(band.grid.point(t)) << ',' << csv::format(band.gamma(t)) << ','
        << csv::format(band.xi_lower * band.gamma(t)) << ',' << csv::format(band.xi_upper * band.gamma(t))
        << '\n';
}

}  // namespace ftsp
