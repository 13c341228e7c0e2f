#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ota {

enum class Errc {
  kInvalidArgument,
  kEmptyScene,
  kSupplyOverflow,
  kNumericUnderflow,
  kNonfiniteInput,
  kTooLarge,
  kUnbalanced,
  kInvalidSpec,
  kParse,
  kIo,
};

// Stable upper-case name used in CLI output and JSON error payloads.
std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errc_name(code_); }

 private:
  Errc code_;
};

}  // namespace ota
