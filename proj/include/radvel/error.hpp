#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radvel {

enum class Errc {
  ZeroRangeDetection,
  InvalidDetection,
  InvalidLossSpec,
  InvalidConfig,
  DegenerateSample,
  NotEnoughDetections,
  NoValidHypothesis,
  RankDeficient,
  NonFinite,
  OutOfSpan,
  NoPairs,
  ParseError,
  MissingColumn,
  NonMonotonicScanId,
  ConfigError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-checkable code; callers that need to map failures onto estimate
/// statuses or exit codes switch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace radvel
