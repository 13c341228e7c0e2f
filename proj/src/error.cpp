#include "ota/error.hpp"

namespace ota {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidArgument: return "INVALID_ARGUMENT";
    case Errc::kEmptyScene: return "EMPTY_SCENE";
    case Errc::kSupplyOverflow: return "SUPPLY_OVERFLOW";
    case Errc::kNumericUnderflow: return "NUMERIC_UNDERFLOW";
    case Errc::kNonfiniteInput: return "NONFINITE_INPUT";
    case Errc::kTooLarge: return "TOO_LARGE";
    case Errc::kUnbalanced: return "UNBALANCED";
    case Errc::kInvalidSpec: return "INVALID_SPEC";
    case Errc::kParse: return "PARSE_ERROR";
    case Errc::kIo: return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace ota
