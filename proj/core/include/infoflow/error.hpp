#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace infoflow {

enum class ErrorCode {
  // market_model
  NoTrades,
  UnsortedInput,
  MixedMarkets,
  BeforeSeriesStart,
  InvalidRecord,
  ParseError,
  // leakage
  AnchorOutOfRange,
  WrongResolutionType,
  InsufficientAnchors,
  ZeroVolume,
  NoWinningTrades,
  // deadline
  OutOfWindow,
  NoEvents,
  BadExposure,
  NoPreEventPrice,
  WrongOutcome,
  NotImplemented,
  // microstructure
  Undefined,
  InsufficientVolume,
  Degenerate,
  FitFailed,
  // wallet
  BadTimestamp,
  ZeroInflow,
  // scoring_eval
  NoData,
  InvalidEffect,
  MarketClosed,
  PartialLabel,
  // synth
  ConfigError,
  Unstable,
  // cli_io
  MissingFile,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a stable code so that
/// callers (and the CLI's --skip-errors path) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace infoflow
