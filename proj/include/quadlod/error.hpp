#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quadlod {

enum class ErrorCode {
  unsupported_ring,
  ring_mismatch,
  zero_element,
  both_zero,
  bounds_too_large,
  zero_or_unit,
  table_too_small,
  io_error,
  format_version_mismatch,
  zero_or_unit_modulus,
  not_coprime,
  principal_character,
  empty_modulus_range,
  unsupported_weight,
  invalid_argument,
  overflow,
};

std::string_view to_string(ErrorCode code);

/// All library failures are reported through this type; `code()` identifies
/// the failure class so callers (and the CLI exit-code mapping) can branch.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace quadlod
