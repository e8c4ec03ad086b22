#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ftsp/fpca.hpp"

namespace ftsp {

/// ((n + pd) / (n - pd)) tr(Sigma_Z) + tail.
double ffpe(Index n, Index p, Index d, double trace_sigma_z, double tail_eigen_sum);

/// Covariate-adjusted variant: ((n + pd + r) / (n - pd - r)) tr(Sigma_Z) + tail.
double ffpex(Index n, Index p, Index d, Index r, double trace_sigma_z, double tail_eigen_sum);

enum class CellStatus { ok, insufficient_data, rank_deficient, degenerate };

std::string_view status_name(CellStatus status);

struct FfpeCell {
  Index p = 0;
  Index d = 0;
  double trace = 0.0;
  double tail = 0.0;
  double value = 0.0;
  CellStatus status = CellStatus::ok;
  std::string reason;
};

struct FfpeTable {
  Index sample_size = 0;
  Index covariate_dim = 0;
  std::vector<FfpeCell> cells;  // ordered by p, then d
  Index best_p = 0;
  Index best_d = 0;

  const FfpeCell& best() const;
  const FfpeCell& cell(Index p, Index d) const;
};

/// Sweeps (p, d) in [0, p_max] x [1, d_max] on the scores of a single eigensystem.
/// All orders share the regression rows p_max..n-1 (max(p_max, 1)..n-1 with covariates).
/// Covariate scores, when supplied, enter every fit as VARX regressors.
FfpeTable select_pd(const EigenSystem& eig, const ScoreMatrix& scores, Index p_max, Index d_max,
                    const std::optional<Matrix>& covariate_scores = std::nullopt);

FfpeTable select_pd(const FunctionalDataset& data, Index p_max, Index d_max,
                    const std::optional<Matrix>& covariate_scores = std::nullopt);

/// Columns p,d,trace,tail,ffpe,status.
void write_ffpe_csv(std::ostream& out, const FfpeTable& table);

}  // namespace ftsp
