#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infoflow/time.hpp"

namespace infoflow {

enum class Category { MilitaryGeopolitics, Regulatory, Corporate, Other };
enum class Outcome { No = 0, Yes = 1 };
enum class ResolutionType { EventResolved, DeadlineResolved, Unclassifiable };
enum class Side { BuyYes, SellYes };
enum class AnchorTier { ProxyOffset, Article, Gdelt, EventOccurrence, DeadlineExpiry };

std::string_view to_string(Category c);
std::string_view to_string(Outcome o);
std::string_view to_string(ResolutionType r);
std::string_view to_string(Side s);
std::string_view to_string(AnchorTier t);

// Parsers throw Error{ParseError} on unknown names.
Category parse_category(std::string_view s);
Outcome parse_outcome(std::string_view s);
ResolutionType parse_resolution_type(std::string_view s);
Side parse_side(std::string_view s);
AnchorTier parse_anchor_tier(std::string_view s);

inline double outcome_value(Outcome o) { return o == Outcome::Yes ? 1.0 : 0.0; }

/// One resolved (or active) binary market. For active markets resolve_ts is
/// the scheduled resolution date.
struct MarketRecord {
  std::string market_id;
  std::string question;
  std::string resolution_criteria;
  Category category = Category::Other;
  Timestamp open_ts{};
  Timestamp resolve_ts{};
  std::optional<Timestamp> deadline_ts;
  Outcome outcome = Outcome::No;
  double total_volume_usdc = 0.0;
  ResolutionType resolution_type = ResolutionType::Unclassifiable;
  // False when the manifest omitted the field; the pipeline then classifies.
  bool has_category = true;
  bool has_resolution_type = true;

  /// Throws Error{InvalidRecord} naming the violated invariant.
  void validate() const;
};

struct Trade {
  Timestamp ts{};
  std::string market_id;
  std::string wallet_id;
  Side side = Side::BuyYes;
  double price = 0.0;  // [0, 1]
  double size = 0.0;   // YES-token units, > 0

  double notional() const { return price * size; }
  double signed_size() const { return side == Side::BuyYes ? size : -size; }
  void validate() const;
};

struct NewsAnchor {
  std::string market_id;
  Timestamp t_news{};
  AnchorTier tier = AnchorTier::Article;
  std::optional<double> proxy_offset_hours;
  double confidence = 1.0;

  void validate() const;
};

/// Anchor at resolve_ts - offset, as used by the resolution-anchored proxy.
NewsAnchor proxy_anchor(const MarketRecord& market, double offset_hours, double confidence = 0.5);

/// Checks the proxy invariant t_news = resolve_ts - offset against a market.
void validate_anchor_for(const NewsAnchor& anchor, const MarketRecord& market);

struct PricePoint {
  Timestamp minute_ts{};
  double vwap = 0.0;
  double volume = 0.0;  // token volume in the minute
};

/// Minute-resolution trade-VWAP series with forward-fill lookup.
class PriceSeries {
 public:
  PriceSeries() = default;
  PriceSeries(std::string market_id, std::vector<PricePoint> points);

  const std::string& market_id() const { return market_id_; }
  std::span<const PricePoint> points() const { return points_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  const PricePoint& front() const { return points_.front(); }
  const PricePoint& back() const { return points_.back(); }

  /// VWAP of the last point with minute_ts <= t. Throws BeforeSeriesStart.
  double price_at(Timestamp t) const;

  /// Last point whose whole minute closes at or before t, i.e. minute_ts + 60s <= t.
  std::optional<PricePoint> last_closed_before(Timestamp t) const;

  /// Points with minute_ts in [from, to].
  std::span<const PricePoint> between(Timestamp from, Timestamp to) const;

 private:
  std::string market_id_;
  std::vector<PricePoint> points_;
};

/// Buckets trades by truncated minute. Trades must be for one market and
/// have non-decreasing timestamps.
PriceSeries build_price_series(std::span<const Trade> trades);

/// Keeps markets with total_volume_usdc >= threshold.
std::vector<MarketRecord> volume_cutoff_filter(std::span<const MarketRecord> markets,
                                               double threshold_usdc = 50000.0);

/// Trades on the side that paid off (BUY_YES when YES, SELL_YES when NO),
/// largest k by token size. Ties: earlier first, then wallet id.
std::vector<Trade> top_winning_trades(std::span<const Trade> trades, Outcome outcome,
                                      std::size_t k = 10);

}  // namespace infoflow
