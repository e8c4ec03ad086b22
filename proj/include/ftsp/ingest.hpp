#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ftsp/curves.hpp"

namespace ftsp {

struct IngestOptions {
  enum class Transform { none, sqrt };

  /// Fill missing cells (empty, NA, NaN, null) by linear interpolation within the curve,
  /// extending endpoints as constants. When false, any missing cell is an error.
  bool interpolate_missing = true;
  Transform transform = Transform::none;
  /// Header name of a label column; each label's mean curve is subtracted from its curves.
  std::optional<std::string> weekday_column;
  /// 0: one curve per row. Otherwise long format, this many consecutive rows per curve.
  Index rows_per_curve = 0;
  /// Long format value column.
  std::string value_column = "value";
};

struct IngestResult {
  FunctionalDataset data;
  std::vector<std::string> labels;  // per curve, when a weekday column is used
  Index missing_cells = 0;
};

IngestResult ingest(std::istream& in, const IngestOptions& options = {});
IngestResult ingest(const std::string& path, const IngestOptions& options = {});

}  // namespace ftsp
