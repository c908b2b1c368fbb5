#pragma once

#include <stdexcept>
#include <string>

namespace pvrfid {

enum class ErrorKind {
  validation,
  infeasible_fill_factor,
  empty_overlap,
  rate_too_high,
  under_voltage,
  degenerate_points,
  nonpositive_distance,
  zero_tau,
  invalid_scenario,
  parse_error,
  unknown_key,
  unit_mismatch,
  io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::infeasible_fill_factor: return "infeasible-fill-factor";
    case ErrorKind::empty_overlap: return "empty-overlap";
    case ErrorKind::rate_too_high: return "rate-too-high";
    case ErrorKind::under_voltage: return "under-voltage";
    case ErrorKind::degenerate_points: return "degenerate-points";
    case ErrorKind::nonpositive_distance: return "nonpositive-distance";
    case ErrorKind::zero_tau: return "zero-tau";
    case ErrorKind::invalid_scenario: return "invalid-scenario";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::unknown_key: return "unknown-key";
    case ErrorKind::unit_mismatch: return "unit-mismatch";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {
inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}
}  // namespace detail

}  // namespace pvrfid
