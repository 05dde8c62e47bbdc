#include "infoflow/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "infoflow/error.hpp"

namespace infoflow {

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) {
    throw Error(ErrorCode::ParseError, "truncated timestamp '" + std::string(text) + "'");
  }
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw Error(ErrorCode::ParseError, "non-digit in timestamp '" + std::string(text) + "'");
    }
    value = value * 10 + (text[i] - '0');
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw Error(ErrorCode::ParseError,
                "expected '" + std::string(1, c) + "' in timestamp '" + std::string(text) + "'");
  }
}

}  // namespace

Timestamp floor_minute(Timestamp t) {
  return std::chrono::floor<std::chrono::minutes>(t);
}

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  const int y = read_int(text, 0, 4);
  expect(text, 4, '-');
  const int mo = read_int(text, 5, 2);
  expect(text, 7, '-');
  const int d = read_int(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != ' ')) {
    throw Error(ErrorCode::ParseError, "missing time part in '" + std::string(text) + "'");
  }
  const int hh = read_int(text, 11, 2);
  expect(text, 13, ':');
  const int mm = read_int(text, 14, 2);
  int ss = 0;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    ss = read_int(text, pos + 1, 2);
    pos += 3;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
  }
  std::string_view zone = text.substr(pos);
  if (!(zone.empty() || zone == "Z" || zone == "+00:00" || zone == "+0000")) {
    throw Error(ErrorCode::ParseError, "non-UTC offset in '" + std::string(text) + "'");
  }
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) {
    throw Error(ErrorCode::ParseError, "field out of range in '" + std::string(text) + "'");
  }
  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Seconds parse_duration(std::string_view text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || value < 0) {
    throw Error(ErrorCode::ParseError, "bad duration '" + std::string(text) + "'");
  }
  std::string_view unit(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
  if (unit.empty() || unit == "s") return Seconds{value};
  if (unit == "m" || unit == "min") return Seconds{value * 60};
  if (unit == "h") return Seconds{value * 3600};
  if (unit == "d") return Seconds{value * 86400};
  throw Error(ErrorCode::ParseError, "bad duration unit '" + std::string(text) + "'");
}

std::string format_duration(Seconds d) {
  const auto s = d.count();
  if (s > 86400 && s % 86400 == 0) return std::to_string(s / 86400) + "d";
  if (s != 0 && s % 3600 == 0) return std::to_string(s / 3600) + "h";
  if (s != 0 && s % 60 == 0) return std::to_string(s / 60) + "min";
  return std::to_string(s) + "s";
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NoTrades: return "NoTrades";
    case ErrorCode::UnsortedInput: return "UnsortedInput";
    case ErrorCode::MixedMarkets: return "MixedMarkets";
    case ErrorCode::BeforeSeriesStart: return "BeforeSeriesStart";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::AnchorOutOfRange: return "AnchorOutOfRange";
    case ErrorCode::WrongResolutionType: return "WrongResolutionType";
    case ErrorCode::InsufficientAnchors: return "InsufficientAnchors";
    case ErrorCode::ZeroVolume: return "ZeroVolume";
    case ErrorCode::NoWinningTrades: return "NoWinningTrades";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::NoEvents: return "NoEvents";
    case ErrorCode::BadExposure: return "BadExposure";
    case ErrorCode::NoPreEventPrice: return "NoPreEventPrice";
    case ErrorCode::WrongOutcome: return "WrongOutcome";
    case ErrorCode::NotImplemented: return "NotImplemented";
    case ErrorCode::Undefined: return "Undefined";
    case ErrorCode::InsufficientVolume: return "InsufficientVolume";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::FitFailed: return "FitFailed";
    case ErrorCode::BadTimestamp: return "BadTimestamp";
    case ErrorCode::ZeroInflow: return "ZeroInflow";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::InvalidEffect: return "InvalidEffect";
    case ErrorCode::MarketClosed: return "MarketClosed";
    case ErrorCode::PartialLabel: return "PartialLabel";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Unstable: return "Unstable";
    case ErrorCode::MissingFile: return "MissingFile";
  }
  return "Unknown";
}

}  // namespace infoflow
