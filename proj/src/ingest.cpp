#include "ftsp/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "csv.hpp"

namespace ftsp {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

Table read_table(std::istream& in, bool force_header) {
  Table table;
  std::string line;
  std::size_t number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++number;
    if (csv::blank(line)) continue;
    auto cells = csv::split(line);
    if (first) {
      first = false;
      const bool textual = std::any_of(cells.begin(), cells.end(), [](const std::string& c) {
        return !csv::missing(c) && !csv::parse_double(c);
      });
      if (force_header || textual) {
        table.header = std::move(cells);
        continue;
      }
    }
    table.rows.push_back(std::move(cells));
    table.line_numbers.push_back(number);
  }
  return table;
}

Index column_index(const Table& table, const std::string& name) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  require(it != table.header.end(), ErrorKind::parse, "column '" + name + "' not found in header");
  return static_cast<Index>(it - table.header.begin());
}

double parse_cell(const std::string& cell, std::size_t line, Index& missing) {
  if (csv::missing(cell)) {
    ++missing;
    return kMissing;
  }
  const auto value = csv::parse_double(cell);
  require(value.has_value(), ErrorKind::parse,
          "line " + std::to_string(line) + ": cannot parse '" + cell + "' as a number");
  return *value;
}

void interpolate_row(Vector& row, Index curve) {
  const Index t_count = row.size();
  std::vector<Index> known;
  for (Index t = 0; t < t_count; ++t)
    if (!std::isnan(row(t))) known.push_back(t);
  require(!known.empty(), ErrorKind::insufficient_data,
          "curve " + std::to_string(curve + 1) + " has no observed values");
  for (Index t = 0; t < known.front(); ++t) row(t) = row(known.front());
  for (Index t = known.back() + 1; t < t_count; ++t) row(t) = row(known.back());
  for (std::size_t i = 0; i + 1 < known.size(); ++i) {
    const Index a = known[i], b = known[i + 1];
    for (Index t = a + 1; t < b; ++t) {
      const double w = static_cast<double>(t - a) / static_cast<double>(b - a);
      row(t) = (1.0 - w) * row(a) + w * row(b);
    }
  }
}

}  // namespace

IngestResult ingest(std::istream& in, const IngestOptions& options) {
  const bool long_format = options.rows_per_curve > 0;
  require(options.rows_per_curve >= 0, ErrorKind::out_of_range, "rows per curve must be nonnegative");
  const Table table = read_table(in, long_format || options.weekday_column.has_value());
  require(!table.rows.empty(), ErrorKind::insufficient_data, "input has no data rows");

  const Index label_col = options.weekday_column ? column_index(table, *options.weekday_column) : -1;
  IngestResult result{FunctionalDataset(Grid(2), Matrix::Zero(1, 2)), {}, 0};
  Matrix values;

  if (long_format) {
    const Index value_col = column_index(table, options.value_column);
    const Index total = static_cast<Index>(table.rows.size());
    const Index per = options.rows_per_curve;
    require(total % per == 0, ErrorKind::dimension,
            std::to_string(total) + " rows do not split into curves of " + std::to_string(per) + " rows");
    values.resize(total / per, per);
    for (Index r = 0; r < total; ++r) {
      const auto& row = table.rows[static_cast<std::size_t>(r)];
      const auto line = table.line_numbers[static_cast<std::size_t>(r)];
      require(value_col < static_cast<Index>(row.size()), ErrorKind::parse,
              "line " + std::to_string(line) + ": missing value column");
      values(r / per, r % per) = parse_cell(row[static_cast<std::size_t>(value_col)], line, result.missing_cells);
      if (label_col >= 0 && r % per == 0) {
        require(label_col < static_cast<Index>(row.size()), ErrorKind::parse,
                "line " + std::to_string(line) + ": missing label column");
        result.labels.push_back(row[static_cast<std::size_t>(label_col)]);
      }
    }
  } else {
    const Index width = static_cast<Index>(table.rows.front().size()) - (label_col >= 0 ? 1 : 0);
    values.resize(static_cast<Index>(table.rows.size()), width);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      const auto line = table.line_numbers[r];
      require(static_cast<Index>(row.size()) == width + (label_col >= 0 ? 1 : 0), ErrorKind::dimension,
              "line " + std::to_string(line) + " has " + std::to_string(row.size()) +
                  " cells, expected " + std::to_string(width + (label_col >= 0 ? 1 : 0)));
      Index t = 0;
      for (Index c = 0; c < static_cast<Index>(row.size()); ++c) {
        if (c == label_col) {
          result.labels.push_back(row[static_cast<std::size_t>(c)]);
          continue;
        }
        values(static_cast<Index>(r), t++) = parse_cell(row[static_cast<std::size_t>(c)], line, result.missing_cells);
      }
    }
  }

  require(values.cols() >= 2, ErrorKind::dimension, "curves need at least 2 grid points");
  if (result.missing_cells > 0) {
    require(options.interpolate_missing, ErrorKind::non_finite,
            std::to_string(result.missing_cells) + " missing cells and interpolation is disabled");
    for (Index k = 0; k < values.rows(); ++k) {
      Vector row = values.row(k).transpose();
      interpolate_row(row, k);
      values.row(k) = row.transpose();
    }
  }

  if (options.transform == IngestOptions::Transform::sqrt) {
    std::string offending;
    Index count = 0;
    for (Index k = 0; k < values.rows(); ++k)
      if ((values.row(k).array() < 0.0).any()) {
        if (count < 20) offending += (count ? "," : "") + std::to_string(k + 1);
        ++count;
      }
    require(count == 0, ErrorKind::out_of_range,
            "square root of negative values in curves " + offending + (count > 20 ? ",..." : ""));
    values = values.cwiseSqrt();
  }

  if (label_col >= 0) {
    std::map<std::string, std::pair<Vector, Index>> groups;
    for (Index k = 0; k < values.rows(); ++k) {
      auto [it, fresh] = groups.try_emplace(result.labels[static_cast<std::size_t>(k)],
                                            Vector::Zero(values.cols()), 0);
      it->second.first += values.row(k).transpose();
      ++it->second.second;
    }
    for (auto& [label, acc] : groups) acc.first /= static_cast<double>(acc.second);
    for (Index k = 0; k < values.rows(); ++k)
      values.row(k) -= groups.at(result.labels[static_cast<std::size_t>(k)]).first.transpose();
  }

  const Grid grid(values.cols());
  result.data = FunctionalDataset(grid, std::move(values));
  return result;
}

IngestResult ingest(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::io, "cannot open '" + path + "'");
  return ingest(in, options);
}

}  // namespace ftsp
