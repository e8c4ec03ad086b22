#include "ftsp/selection.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "csv.hpp"
#include "linalg.hpp"

namespace ftsp {

double ffpe(Index n, Index p, Index d, double trace_sigma_z, double tail_eigen_sum) {
  return ffpex(n, p, d, 0, trace_sigma_z, tail_eigen_sum);
}

double ffpex(Index n, Index p, Index d, Index r, double trace_sigma_z, double tail_eigen_sum) {
  require(p >= 0 && d >= 0 && r >= 0, ErrorKind::out_of_range, "fFPE: negative p, d or r");
  require(trace_sigma_z >= 0.0 && tail_eigen_sum >= 0.0, ErrorKind::out_of_range,
          "fFPE: trace and tail must be nonnegative");
  const Index params = p * d + r;
  require(n > params, ErrorKind::invalid_cell,
          "fFPE undefined for n = " + std::to_string(n) + " <= pd + r = " + std::to_string(params));
  const double num = static_cast<double>(n + params);
  const double den = static_cast<double>(n - params);
  return num / den * trace_sigma_z + tail_eigen_sum;
}

std::string_view status_name(CellStatus status) {
  switch (status) {
    case CellStatus::ok: return "ok";
    case CellStatus::insufficient_data: return "insufficient_data";
    case CellStatus::rank_deficient: return "rank_deficient";
    case CellStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

const FfpeCell& FfpeTable::best() const { return cell(best_p, best_d); }

const FfpeCell& FfpeTable::cell(Index p, Index d) const {
  for (const auto& c : cells)
    if (c.p == p && c.d == d) return c;
  fail(ErrorKind::out_of_range,
       "no cell (p=" + std::to_string(p) + ", d=" + std::to_string(d) + ") in table");
}

FfpeTable select_pd(const EigenSystem& eig, const ScoreMatrix& scores, Index p_max, Index d_max,
                    const std::optional<Matrix>& covariate_scores) {
  const Index n = scores.rows();
  require(p_max >= 0, ErrorKind::out_of_range, "p_max must be nonnegative");
  require(d_max >= 1 && d_max <= eig.dim() && d_max <= scores.cols(), ErrorKind::out_of_range,
          "d_max " + std::to_string(d_max) + " exceeds the computed eigensystem dimension " +
              std::to_string(std::min(eig.dim(), scores.cols())));
  const Index r = covariate_scores ? covariate_scores->cols() : 0;
  if (covariate_scores)
    require(covariate_scores->rows() == n, ErrorKind::dimension,
            "covariate scores have " + std::to_string(covariate_scores->rows()) +
                " rows, expected " + std::to_string(n));

  FfpeTable table;
  table.sample_size = n;
  table.covariate_dim = r;
  const Index rank = eig.numerical_rank();

  // Every order is fitted on the same response rows first..n-1, so criteria compare like with like.
  const Index first = r > 0 ? std::max<Index>(p_max, 1) : p_max;
  for (Index p = 0; p <= p_max; ++p) {
    const Index rows = n - first;
    Matrix gram;
    if (rows >= 1) {
      Matrix stacked(rows, (p + 1) * d_max + r);
      for (Index j = 0; j <= p; ++j)
        stacked.middleCols(j * d_max, d_max) = scores.leftCols(d_max).middleRows(first - j, rows);
      if (r > 0) stacked.rightCols(r) = covariate_scores->middleRows(first - 1, rows);
      gram = stacked.transpose() * stacked;
    }

    for (Index d = 1; d <= d_max; ++d) {
      FfpeCell cell;
      cell.p = p;
      cell.d = d;
      cell.tail = eig.tail_sum(d);
      const Index cols = p * d + r;
      if (d > rank) {
        cell.status = CellStatus::degenerate;
        cell.reason = "dimension exceeds numerical rank " + std::to_string(rank);
      } else if (rows <= cols || n <= cols) {
        cell.status = CellStatus::insufficient_data;
        cell.reason = "needs more than " + std::to_string(cols + first) + " observations";
      } else {
        std::vector<Index> x_idx;
        for (Index j = 1; j <= p; ++j)
          for (Index l = 0; l < d; ++l) x_idx.push_back(j * d_max + l);
        for (Index c = 0; c < r; ++c) x_idx.push_back((p + 1) * d_max + c);
        std::vector<Index> z_idx;
        for (Index l = 0; l < d; ++l) z_idx.push_back(l);

        double residual_ss = 0.0;
        for (Index l : z_idx) residual_ss += gram(l, l);
        bool fitted = true;
        if (cols > 0) {
          const Matrix xx = gram(x_idx, x_idx);
          const Matrix xz = gram(x_idx, z_idx);
          const auto solved = detail::solve_symmetric(xx, xz);
          if (solved.deficient_column) {
            fitted = false;
            cell.status = CellStatus::rank_deficient;
            cell.reason = "singular regressor Gram matrix";
          } else {
            residual_ss -= (xz.transpose() * solved.solution).trace();
          }
        }
        if (fitted) {
          cell.trace = std::max(0.0, residual_ss) / static_cast<double>(rows);
          cell.value = ffpex(n, p, d, r, cell.trace, cell.tail);
        }
      }
      table.cells.push_back(std::move(cell));
    }
  }

  const FfpeCell* best = nullptr;
  for (const auto& c : table.cells) {
    if (c.status != CellStatus::ok) continue;
    if (!best || c.value < best->value ||
        (c.value == best->value && (c.d < best->d || (c.d == best->d && c.p < best->p))))
      best = &c;
  }
  require(best != nullptr, ErrorKind::selection_failure,
          "no (p, d) cell could be fitted; reduce p_max or d_max");
  table.best_p = best->p;
  table.best_d = best->d;
  return table;
}

FfpeTable select_pd(const FunctionalDataset& data, Index p_max, Index d_max,
                    const std::optional<Matrix>& covariate_scores) {
  require(d_max >= 1 && d_max <= std::min(data.size() - 1, data.grid().size()),
          ErrorKind::out_of_range, "d_max out of range for the dataset");
  const EigenSystem eig = eigensystem(data, d_max);
  return select_pd(eig, scores(data, eig), p_max, d_max, covariate_scores);
}

void write_ffpe_csv(std::ostream& out, const FfpeTable& table) {
  out << "p,d,trace,tail,ffpe,status\n";
  for (const auto& c : table.cells) {
    out << c.p << ',' << c.d << ',' << csv::format(c.trace) << ',' << csv::format(c.tail) << ',';
    if (c.status == CellStatus::ok) out << csv::format(c.value);
    out << ',' << status_name(c.status) << '\n';
  }
}

}  // namespace ftsp
