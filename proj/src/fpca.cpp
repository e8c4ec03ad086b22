#include "ftsp/fpca.hpp"

#include <algorithm>

namespace ftsp {

namespace {

constexpr double kRankTolerance = 1e-12;

void fix_sign(Eigen::Ref<Vector> v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}

}  // namespace

double EigenSystem::tail_sum(Index d) const {
  require(d >= 0 && d <= spectrum.size(), ErrorKind::out_of_range,
          "tail_sum: dimension " + std::to_string(d) + " out of range");
  return std::max(0.0, total_variance - spectrum.head(d).sum());
}

double EigenSystem::pve(Index d) const {
  if (total_variance <= 0.0) return 1.0;
  return std::min(1.0, spectrum.head(d).sum() / total_variance);
}

Index EigenSystem::numerical_rank() const {
  if (spectrum.size() == 0 || spectrum(0) <= 0.0) return 0;
  const double cut = kRankTolerance * spectrum(0);
  Index r = 0;
  while (r < spectrum.size() && spectrum(r) > cut) ++r;
  return r;
}

Vector sample_mean(const FunctionalDataset& data) {
  return data.values().colwise().mean().transpose();
}

Matrix sample_covariance_kernel(const FunctionalDataset& data) {
  require(data.size() >= 2, ErrorKind::insufficient_data,
          "covariance kernel needs at least 2 curves, got " + std::to_string(data.size()));
  const Matrix centered = data.values().rowwise() - sample_mean(data).transpose();
  const double n = static_cast<double>(data.size());
  Matrix kernel = Matrix::Zero(centered.cols(), centered.cols());
  kernel.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose(), 1.0 / n);
  kernel.triangularView<Eigen::StrictlyUpper>() = kernel.transpose();
  return kernel;
}

EigenSystem eigensystem(const FunctionalDataset& data, Index d) {
  const Index n = data.size();
  const Index T = data.grid().size();
  require(n >= 2, ErrorKind::insufficient_data, "eigensystem needs at least 2 curves");
  require(d >= 1 && d <= std::min(n - 1, T), ErrorKind::out_of_range,
          "eigensystem: dimension " + std::to_string(d) + " outside [1, " +
              std::to_string(std::min(n - 1, T)) + "]");

  EigenSystem eig{data.grid(), sample_mean(data), {}, {}, {}, 0.0};
  const Matrix op = sample_covariance_kernel(data) / static_cast<double>(T);
  eig.total_variance = op.trace();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(op);
  require(solver.info() == Eigen::Success, ErrorKind::degenerate,
          "symmetric eigensolver did not converge");
  // Solver returns ascending order.
  eig.spectrum = solver.eigenvalues().reverse().cwiseMax(0.0);
  eig.eigenvalues = eig.spectrum.head(d);
  eig.eigenfunctions.resize(d, T);
  const double scale = std::sqrt(static_cast<double>(T));
  for (Index l = 0; l < d; ++l) {
    Vector v = solver.eigenvectors().col(T - 1 - l) * scale;
    fix_sign(v);
    eig.eigenfunctions.row(l) = v.transpose();
  }
  return eig;
}

EigenSystem truncate(const EigenSystem& eig, Index d) {
  require(d >= 0 && d <= eig.dim(), ErrorKind::out_of_range,
          "truncate: dimension " + std::to_string(d) + " exceeds " + std::to_string(eig.dim()));
  EigenSystem out = eig;
  out.eigenvalues = eig.eigenvalues.head(d);
  out.eigenfunctions = eig.eigenfunctions.topRows(d);
  return out;
}

Index dimension_for_pve(const EigenSystem& eig, double threshold) {
  const Index rank = eig.numerical_rank();
  for (Index d = 1; d <= rank; ++d)
    if (eig.pve(d) >= threshold) return d;
  return rank;
}

ScoreMatrix project(const Matrix& curves, const EigenSystem& eig) {
  require(curves.cols() == eig.grid.size(), ErrorKind::dimension,
          "curves have " + std::to_string(curves.cols()) + " samples, eigensystem grid has " +
              std::to_string(eig.grid.size()));
  return ((curves.rowwise() - eig.mean.transpose()) * eig.eigenfunctions.transpose()) /
         static_cast<double>(eig.grid.size());
}

ScoreMatrix scores(const FunctionalDataset& data, const EigenSystem& eig) {
  require(data.grid() == eig.grid, ErrorKind::dimension, "dataset and eigensystem grids differ");
  return project(data.values(), eig);
}

FunctionalDataset reconstruct(const ScoreMatrix& score_matrix, const EigenSystem& eig) {
  require(score_matrix.cols() == eig.dim(), ErrorKind::dimension,
          "score matrix has " + std::to_string(score_matrix.cols()) +
              " columns, eigensystem has dimension " + std::to_string(eig.dim()));
  Matrix values = score_matrix * eig.eigenfunctions;
  values.rowwise() += eig.mean.transpose();
  return FunctionalDataset(eig.grid, std::move(values));
}

}  // namespace ftsp
