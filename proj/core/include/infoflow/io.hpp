#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infoflow/market.hpp"
#include "infoflow/wallet.hpp"

namespace infoflow {

using nlohmann::json;

/// One rejected input line.
struct InputIssue {
  std::string file;
  std::size_t line = 0;  // 1-based; 0 = whole file
  std::string message;

  std::string to_string() const;
};

// Field-level conversions. Readers accept ISO-8601 strings or integer unix
// seconds for timestamps; writers always emit ISO-8601.
MarketRecord market_from_json(const json& j);
json to_json(const MarketRecord& m);
Trade trade_from_json(const json& j);
json to_json(const Trade& t);
NewsAnchor anchor_from_json(const json& j);
json to_json(const NewsAnchor& a);
WalletProfile wallet_from_json(const json& j);
json to_json(const WalletProfile& w);

/// Reader behaviour: with issues == nullptr the first bad line throws
/// Error{ParseError} prefixed "file:line:"; otherwise bad lines are recorded
/// and skipped. Blank lines are ignored.
std::vector<MarketRecord> read_markets(const std::filesystem::path& path,
                                       std::vector<InputIssue>* issues = nullptr);
/// JSON Lines, or CSV when the extension is .csv (header:
/// ts,market_id,wallet_id,side,price,size).
std::vector<Trade> read_trades(const std::filesystem::path& path,
                               std::vector<InputIssue>* issues = nullptr);
std::vector<NewsAnchor> read_anchors(const std::filesystem::path& path,
                                     std::vector<InputIssue>* issues = nullptr);
std::vector<WalletProfile> read_wallets(const std::filesystem::path& path,
                                        std::vector<InputIssue>* issues = nullptr);

/// Reads a JSON Lines file into raw objects (used by label/murphy inputs).
std::vector<json> read_jsonl(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows);
void write_jsonl(std::ostream& out, const std::vector<json>& rows);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// FNV-1a 64-bit over bytes, hex-encoded. Stable across platforms.
std::string fnv1a_hex(std::string_view bytes);

/// Schema tag carried by every emitted JSON row.
inline constexpr int kSchemaVersion = 1;

}  // namespace infoflow
