#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ftsp/multivar.hpp"
#include "ftsp/selection.hpp"
#include "test_support.hpp"

namespace ftsp {
namespace {

TEST(Ffpe, Arithmetic) {
  EXPECT_NEAR(ffpe(100, 1, 2, 2.0, 0.5), 102.0 / 98.0 * 2.0 + 0.5, 1e-15);
  EXPECT_NEAR(ffpe(100, 1, 2, 2.0, 0.5), 2.5816326530612246, 1e-12);
  EXPECT_DOUBLE_EQ(ffpe(50, 0, 4, 1.7, 0.3), 2.0);
  EXPECT_DOUBLE_EQ(ffpe(50, 0, 4, 0.9, 0.0), 0.9);
}

TEST(Ffpe, InvalidCell) {
  try {
    ffpe(10, 2, 5, 1.0, 0.0);
    FAIL() << "expected invalid cell";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_cell);
  }
}

TEST(Ffpe, StrictlyIncreasingInDimensionFactor) {
  for (Index d = 1; d < 20; ++d) EXPECT_LT(ffpe(200, 2, d, 1.0, 0.0), ffpe(200, 2, d + 1, 1.0, 0.0));
}

TEST(Ffpex, Arithmetic) {
  EXPECT_DOUBLE_EQ(ffpex(100, 1, 2, 0, 2.0, 0.5), ffpe(100, 1, 2, 2.0, 0.5));
  EXPECT_NEAR(ffpex(100, 1, 3, 2, 1.5, 0.2), 105.0 / 95.0 * 1.5 + 0.2, 1e-15);
  EXPECT_NEAR(ffpex(100, 1, 3, 2, 1.5, 0.2), 1.8578947368421053, 1e-12);
  for (Index r = 0; r < 10; ++r) EXPECT_LT(ffpex(100, 1, 3, r, 1.5, 0.2), ffpex(100, 1, 3, r + 1, 1.5, 0.2));
  EXPECT_THROW(ffpex(10, 1, 3, 7, 1.0, 0.0), Error);
}

TEST(SelectPd, CellsMatchDirectFits) {
  std::mt19937_64 rng(1);
  const FunctionalDataset data = testing::random_curves(80, 6, 48, rng);
  const FfpeTable table = select_pd(data, 2, 4);
  const EigenSystem eig = eigensystem(data, 4);
  const ScoreMatrix y = scores(data, eig);
  for (const auto& cell : table.cells) {
    ASSERT_EQ(cell.status, CellStatus::ok);
    const VarModel model = fit_var_ols(y.bottomRows(80 - 2 + cell.p).leftCols(cell.d), cell.p);
    EXPECT_NEAR(cell.trace, model.sigma_z.trace(), 1e-9 * model.sigma_z.trace());
    EXPECT_NEAR(cell.tail, eig.tail_sum(cell.d), 1e-8);
    EXPECT_DOUBLE_EQ(cell.value, ffpe(80, cell.p, cell.d, cell.trace, cell.tail));
  }
  EXPECT_EQ(table.cells.size(), 12u);
  const FfpeCell* best = &table.cells.front();
  for (const auto& cell : table.cells)
    if (cell.value < best->value) best = &cell;
  EXPECT_EQ(table.best_p, best->p);
  EXPECT_EQ(table.best_d, best->d);
}

TEST(SelectPd, DeterministicAndCsv) {
  std::mt19937_64 rng(2);
  const FunctionalDataset data = testing::random_curves(60, 5, 40, rng);
  const FfpeTable a = select_pd(data, 2, 3);
  const FfpeTable b = select_pd(data, 2, 3);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) EXPECT_EQ(a.cells[i].value, b.cells[i].value);
  std::ostringstream out;
  write_ffpe_csv(out, a);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "p,d,trace,tail,ffpe,status");
  Index lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 9);
}

TEST(SelectPd, WhiteNoiseMostlyPicksOrderZero) {
  std::mt19937_64 rng(3);
  int zero = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const FunctionalDataset data = testing::random_curves(2000, 4, 32, rng);
    if (select_pd(data, 1, 1).best_p == 0) ++zero;
  }
  EXPECT_GE(zero, 75);
}

TEST(SelectPd, NoiselessLowRankPicksTrueDimension) {
  // Two-dimensional rotation by 45 degrees: exact VAR(1) of rank 2, mean zero over full periods.
  const Grid grid(64);
  const FourierBasis basis = make_fourier_basis(4, grid);
  const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
  Matrix coeffs = Matrix::Zero(64, 4);
  Eigen::Vector2d state(2.0, 0.5);
  for (Index k = 0; k < 64; ++k) {
    coeffs.row(k).segment(1, 2) = state.transpose();
    state = Eigen::Vector2d(c * state(0) - s * state(1), s * state(0) + c * state(1));
  }
  const FfpeTable table = select_pd(synthesize(coeffs, basis), 2, 3);
  EXPECT_EQ(table.best_d, 2);
  EXPECT_EQ(table.cell(0, 3).status, CellStatus::degenerate);
  EXPECT_LT(table.best().value, 1e-12);
}

TEST(SelectPd, InsufficientDataCellsAndFailure) {
  std::mt19937_64 rng(4);
  const FunctionalDataset data = testing::random_curves(12, 6, 48, rng);
  const FfpeTable table = select_pd(data, 3, 5);
  EXPECT_EQ(table.cell(3, 5).status, CellStatus::insufficient_data);
  EXPECT_FALSE(table.cell(3, 5).reason.empty());
  EXPECT_EQ(table.best().status, CellStatus::ok);

  const FunctionalDataset flat(Grid(8), Matrix::Ones(5, 8));
  try {
    select_pd(flat, 1, 2);
    FAIL() << "expected selection failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::selection_failure);
  }
}

TEST(SelectPd, CovariateCellsUseAdjustedCriterion) {
  std::mt19937_64 rng(5);
  const FunctionalDataset data = testing::random_curves(100, 5, 40, rng);
  const Matrix r = testing::gaussian(100, 2, rng);
  const FfpeTable table = select_pd(data, 1, 3, r);
  EXPECT_EQ(table.covariate_dim, 2);
  const EigenSystem eig = eigensystem(data, 3);
  const ScoreMatrix y = scores(data, eig);
  for (const auto& cell : table.cells) {
    const Index rows = 100 - 1 + std::max<Index>(cell.p, 1);
    const VarModel model = fit_varx_ols(y.bottomRows(rows).leftCols(cell.d), r.bottomRows(rows), cell.p);
    EXPECT_NEAR(cell.trace, model.sigma_z.trace(), 1e-9 * model.sigma_z.trace());
    EXPECT_DOUBLE_EQ(cell.value, ffpex(100, cell.p, cell.d, 2, cell.trace, cell.tail));
  }
}

}  // namespace
}  // namespace ftsp
