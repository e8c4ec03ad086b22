#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ftsp {

enum class ErrorKind {
  dimension,
  resolution,
  out_of_range,
  insufficient_data,
  non_finite,
  rank_deficient,
  singular,
  degenerate,
  ill_conditioned,
  nonstationary,
  invalid_cell,
  selection_failure,
  unsupported,
  parse,
  io,
};

constexpr std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::rank_deficient: return "rank_deficient";
    case ErrorKind::singular: return "singular";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::ill_conditioned: return "ill_conditioned";
    case ErrorKind::nonstationary: return "nonstationary";
    case ErrorKind::invalid_cell: return "invalid_cell";
    case ErrorKind::selection_failure: return "selection_failure";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace ftsp
