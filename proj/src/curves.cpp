#include "ftsp/curves.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include "csv.hpp"

namespace ftsp {

Grid::Grid(Index size) : size_(size) {
  require(size >= 2, ErrorKind::out_of_range,
          "grid needs at least 2 points, got " + std::to_string(size));
}

Vector Grid::points() const {
  Vector t(size_);
  for (Index i = 0; i < size_; ++i) t(i) = point(i);
  return t;
}

FunctionalDataset::FunctionalDataset(Grid grid, Matrix values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.rows() >= 1, ErrorKind::insufficient_data, "dataset has no curves");
  require(values_.cols() == grid_.size(), ErrorKind::dimension,
          "dataset has " + std::to_string(values_.cols()) + " columns but grid has " +
              std::to_string(grid_.size()) + " points");
  require(values_.allFinite(), ErrorKind::non_finite, "dataset contains non-finite values");
}

FunctionalDataset FunctionalDataset::slice(Index first, Index count) const {
  require(first >= 0 && count >= 1 && first + count <= size(), ErrorKind::out_of_range,
          "slice [" + std::to_string(first) + ", " + std::to_string(first + count) +
              ") outside dataset of size " + std::to_string(size()));
  return FunctionalDataset(grid_, values_.middleRows(first, count));
}

FourierBasis make_fourier_basis(Index dim, const Grid& grid) {
  require(dim >= 1, ErrorKind::out_of_range, "basis dimension must be positive");
  require(grid.size() >= 8 * dim, ErrorKind::resolution,
          "grid of " + std::to_string(grid.size()) + " points too coarse for " +
              std::to_string(dim) + " Fourier functions (need >= " +
              std::to_string(8 * dim) + ")");
  const double two_pi = 2.0 * std::numbers::pi;
  const double root2 = std::numbers::sqrt2;
  Matrix values(dim, grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double t = grid.point(i);
    values(0, i) = 1.0;
    for (Index row = 1; row < dim; ++row) {
      const auto freq = static_cast<double>((row + 1) / 2);
      values(row, i) = row % 2 == 1 ? root2 * std::sin(two_pi * freq * t)
                                    : root2 * std::cos(two_pi * freq * t);
    }
  }
  return FourierBasis{grid, std::move(values)};
}

FunctionalDataset synthesize(const Matrix& coeffs, const FourierBasis& basis) {
  require(coeffs.cols() == basis.dim(), ErrorKind::dimension,
          "coefficient matrix has " + std::to_string(coeffs.cols()) +
              " columns, basis has " + std::to_string(basis.dim()) + " functions");
  return FunctionalDataset(basis.grid, coeffs * basis.values);
}

FunctionalDataset read_curves_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::blank(line)) continue;
    auto fields = csv::split(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      auto value = csv::parse_double(f);
      if (!value) {
        numeric = false;
        break;
      }
      row.push_back(*value);
    }
    if (!numeric) {
      require(rows.empty() && line_no == 1, ErrorKind::parse,
              "non-numeric value on line " + std::to_string(line_no));
      continue;  // header
    }
    if (!rows.empty())
      require(row.size() == rows.front().size(), ErrorKind::parse,
              "line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                  " values, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorKind::parse, "no curves in input");
  Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index k = 0; k < values.rows(); ++k)
    for (Index i = 0; i < values.cols(); ++i) values(k, i) = rows[k][i];
  const Grid grid(values.cols());
  return FunctionalDataset(grid, std::move(values));
}

FunctionalDataset read_curves_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot open " + path);
  return read_curves_csv(in);
}

void write_curves_csv(std::ostream& out, const FunctionalDataset& data, bool header) {
  const Index T = data.grid().size();
  if (header) {
    for (Index i = 0; i < T; ++i) out << (i ? "," : "") << "t_" << i + 1;
    out << '\n';
  }
  for (Index k = 0; k < data.size(); ++k) {
    for (Index i = 0; i < T; ++i) out << (i ? "," : "") << csv::format(data.values()(k, i));
    out << '\n';
  }
}

void write_curves_csv(const std::string& path, const FunctionalDataset& data, bool header) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::io, "cannot write " + path);
  write_curves_csv(out, data, header);
}

}  // namespace ftsp
