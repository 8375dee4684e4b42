#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flowloss {

enum class Errc {
  BadMagic,
  TruncatedPayload,
  NonPositiveDims,
  NonFiniteSample,
  UnsupportedTiff,
  MissingScaleTag,
  CorruptStrip,
  PatchLargerThanGrid,
  LengthMismatch,
  DimMismatch,
  BadTensorFile,
  InvalidArgument,
};

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::BadMagic: return "BadMagic";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::NonPositiveDims: return "NonPositiveDims";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::UnsupportedTiff: return "UnsupportedTiff";
    case Errc::MissingScaleTag: return "MissingScaleTag";
    case Errc::CorruptStrip: return "CorruptStrip";
    case Errc::PatchLargerThanGrid: return "PatchLargerThanGrid";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::BadTensorFile: return "BadTensorFile";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace flowloss
