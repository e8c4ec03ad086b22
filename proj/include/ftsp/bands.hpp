#pragma once

#include <iosfwd>

#include "ftsp/curves.hpp"

namespace ftsp {

/// Uniform band  Yhat(t) - xi_lower * gamma(t) <= Y(t) <= Yhat(t) + xi_upper * gamma(t).
struct PredictionBand {
  Grid grid{2};
  Vector gamma;
  double xi_lower = 0.0;
  double xi_upper = 0.0;
  double alpha = 0.0;
  Index residual_count = 0;

  Vector lower(const Vector& prediction) const { return prediction - xi_lower * gamma; }
  Vector upper(const Vector& prediction) const { return prediction + xi_upper * gamma; }
  /// Whether a residual curve Y - Yhat lies inside the band at every grid point with
  /// non-vanishing gamma.
  bool covers(const Vector& residual) const;
};

/// L = max(p, 10 d, n / 4).
Index default_warmup(Index n, Index d, Index p);

/// One-step residuals Y_k - Yhat_k for k = L+1..n, each prediction fitted on the first k-1
/// curves with eigenfunctions and mean from the full sample.
FunctionalDataset rolling_residuals(const FunctionalDataset& data, Index d, Index p, Index warmup);

PredictionBand prediction_band(const FunctionalDataset& residuals, double alpha, bool symmetric = true);

/// Fraction of residual curves inside the band.
double coverage(const PredictionBand& band, const FunctionalDataset& residuals);

/// Columns t, gamma, lower_offset, upper_offset.
void write_band_csv(std::ostream& out, const PredictionBand& band);

}  // namespace ftsp
