#pragma once

#include <cmath>
#include <iosfwd>
#include <string>

#include "ftsp/errors.hpp"
#include "ftsp/types.hpp"

namespace ftsp {

/// Equispaced midpoint grid on [0,1]: t_i = (i + 1/2) / T for i = 0..T-1.
class Grid {
 public:
  explicit Grid(Index size);

  Index size() const noexcept { return size_; }
  double spacing() const noexcept { return 1.0 / static_cast<double>(size_); }
  double point(Index i) const noexcept {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(size_);
  }
  Vector points() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Index size_;
};

/// n curves sampled on a shared grid; row k is curve k.
class FunctionalDataset {
 public:
  FunctionalDataset(Grid grid, Matrix values);

  const Grid& grid() const noexcept { return grid_; }
  const Matrix& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.rows(); }
  auto curve(Index k) const { return values_.row(k); }

  /// Rows [first, first + count).
  FunctionalDataset slice(Index first, Index count) const;

 private:
  Grid grid_;
  Matrix values_;
};

/// Unit-norm Fourier system: 1, sqrt2 sin(2 pi j t), sqrt2 cos(2 pi j t), ...
struct FourierBasis {
  Grid grid;
  Matrix values;  // D x T

  Index dim() const noexcept { return values.rows(); }
};

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar inner_product(const Eigen::MatrixBase<DerivedA>& f,
                                        const Eigen::MatrixBase<DerivedB>& g,
                                        const Grid& grid) {
  require(f.size() == grid.size() && g.size() == grid.size(), ErrorKind::dimension,
          "inner_product: vector lengths " + std::to_string(f.size()) + " and " +
              std::to_string(g.size()) + " do not match grid size " +
              std::to_string(grid.size()));
  using Scalar = typename DerivedA::Scalar;
  const Scalar sum = f.reshaped().dot(g.reshaped().template cast<Scalar>());
  return sum / static_cast<Scalar>(grid.size());
}

template <typename Derived>
typename Derived::Scalar l2_norm(const Eigen::MatrixBase<Derived>& f, const Grid& grid) {
  using std::sqrt;
  return sqrt(inner_product(f, f, grid));
}

FourierBasis make_fourier_basis(Index dim, const Grid& grid);

/// Row k of the result is sum_l coeffs(k, l) * basis row l.
FunctionalDataset synthesize(const Matrix& coeffs, const FourierBasis& basis);

/// Curve CSV: one row per curve, optional single non-numeric header row.
FunctionalDataset read_curves_csv(std::istream& in);
FunctionalDataset read_curves_csv(const std::string& path);
void write_curves_csv(std::ostream& out, const FunctionalDataset& data, bool header = false);
void write_curves_csv(const std::string& path, const FunctionalDataset& data,
                      bool header = false);

}  // namespace ftsp
