#include "infoflow/market.hpp"

#include <algorithm>
#include <cmath>

#include "infoflow/error.hpp"

namespace infoflow {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::pair<std::string_view, E> (&table)[N],
             std::string_view what) {
  for (const auto& [name, value] : table) {
    if (name == s) return value;
  }
  throw Error(ErrorCode::ParseError, "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

constexpr std::pair<std::string_view, Category> kCategories[] = {
    {"military_geopolitics", Category::MilitaryGeopolitics},
    {"regulatory", Category::Regulatory},
    {"corporate", Category::Corporate},
    {"other", Category::Other},
};
constexpr std::pair<std::string_view, Outcome> kOutcomes[] = {
    {"YES", Outcome::Yes}, {"NO", Outcome::No}, {"1", Outcome::Yes}, {"0", Outcome::No}};
constexpr std::pair<std::string_view, ResolutionType> kResolutionTypes[] = {
    {"event_resolved", ResolutionType::EventResolved},
    {"deadline_resolved", ResolutionType::DeadlineResolved},
    {"unclassifiable", ResolutionType::Unclassifiable},
};
constexpr std::pair<std::string_view, Side> kSides[] = {
    {"BUY_YES", Side::BuyYes}, {"SELL_YES", Side::SellYes}};
constexpr std::pair<std::string_view, AnchorTier> kTiers[] = {
    {"proxy_offset", AnchorTier::ProxyOffset},
    {"article", AnchorTier::Article},
    {"gdelt", AnchorTier::Gdelt},
    {"event_occurrence", AnchorTier::EventOccurrence},
    {"deadline_expiry", AnchorTier::DeadlineExpiry},
};

template <typename E, std::size_t N>
std::string_view name_of(E value, const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

}  // namespace

std::string_view to_string(Category c) { return name_of(c, kCategories); }
std::string_view to_string(Outcome o) { return name_of(o, kOutcomes); }
std::string_view to_string(ResolutionType r) { return name_of(r, kResolutionTypes); }
std::string_view to_string(Side s) { return name_of(s, kSides); }
std::string_view to_string(AnchorTier t) { return name_of(t, kTiers); }

Category parse_category(std::string_view s) { return parse_enum(s, kCategories, "category"); }
Outcome parse_outcome(std::string_view s) { return parse_enum(s, kOutcomes, "outcome"); }
ResolutionType parse_resolution_type(std::string_view s) {
  return parse_enum(s, kResolutionTypes, "resolution_type");
}
Side parse_side(std::string_view s) { return parse_enum(s, kSides, "side"); }
AnchorTier parse_anchor_tier(std::string_view s) { return parse_enum(s, kTiers, "tier"); }

void MarketRecord::validate() const {
  if (market_id.empty()) throw Error(ErrorCode::InvalidRecord, "market_id is empty");
  if (!(open_ts < resolve_ts)) {
    throw Error(ErrorCode::InvalidRecord, market_id + ": open_ts must precede resolve_ts");
  }
  if (deadline_ts && !(open_ts < *deadline_ts)) {
    throw Error(ErrorCode::InvalidRecord, market_id + ": open_ts must precede deadline_ts");
  }
  if (resolution_type == ResolutionType::DeadlineResolved && outcome == Outcome::No &&
      !deadline_ts) {
    throw Error(ErrorCode::InvalidRecord,
                market_id + ": NO-resolved deadline market requires deadline_ts");
  }
  if (!(total_volume_usdc >= 0.0) || !std::isfinite(total_volume_usdc)) {
    throw Error(ErrorCode::InvalidRecord, market_id + ": total_volume_usdc must be >= 0");
  }
}

void Trade::validate() const {
  if (!(price >= 0.0 && price <= 1.0)) {
    throw Error(ErrorCode::InvalidRecord, "price " + std::to_string(price) + " outside [0,1]");
  }
  if (!(size > 0.0) || !std::isfinite(size)) {
    throw Error(ErrorCode::InvalidRecord, "size must be > 0");
  }
  if (market_id.empty()) throw Error(ErrorCode::InvalidRecord, "market_id is empty");
}

void NewsAnchor::validate() const {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw Error(ErrorCode::InvalidRecord, "confidence outside [0,1]");
  }
  if (tier == AnchorTier::ProxyOffset && !(proxy_offset_hours && *proxy_offset_hours > 0.0)) {
    throw Error(ErrorCode::InvalidRecord, "proxy_offset anchor requires positive proxy_offset_hours");
  }
}

NewsAnchor proxy_anchor(const MarketRecord& market, double offset_hours, double confidence) {
  NewsAnchor a;
  a.market_id = market.market_id;
  a.tier = AnchorTier::ProxyOffset;
  a.proxy_offset_hours = offset_hours;
  a.confidence = confidence;
  a.t_news = market.resolve_ts - Seconds{std::llround(offset_hours * 3600.0)};
  return a;
}

void validate_anchor_for(const NewsAnchor& anchor, const MarketRecord& market) {
  anchor.validate();
  if (anchor.tier == AnchorTier::ProxyOffset) {
    const auto expected = market.resolve_ts - Seconds{std::llround(*anchor.proxy_offset_hours * 3600.0)};
    if (anchor.t_news != expected) {
      throw Error(ErrorCode::InvalidRecord,
                  market.market_id + ": proxy anchor t_news must equal resolve_ts - offset");
    }
  }
}

PriceSeries::PriceSeries(std::string market_id, std::vector<PricePoint> points)
    : market_id_(std::move(market_id)), points_(std::move(points)) {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i - 1].minute_ts < points_[i].minute_ts)) {
      throw Error(ErrorCode::UnsortedInput, "price series minutes must be strictly increasing");
    }
  }
  for (const auto& p : points_) {
    if (!(p.vwap >= 0.0 && p.vwap <= 1.0)) {
      throw Error(ErrorCode::InvalidRecord, "vwap outside [0,1]");
    }
  }
}

double PriceSeries::price_at(Timestamp t) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](Timestamp v, const PricePoint& p) { return v < p.minute_ts; });
  if (it == points_.begin()) {
    throw Error(ErrorCode::BeforeSeriesStart,
                market_id_ + ": no price at or before " + format_iso8601(t));
  }
  return std::prev(it)->vwap;
}

std::optional<PricePoint> PriceSeries::last_closed_before(Timestamp t) const {
  const Timestamp cutoff = t - kMinute;
  auto it = std::upper_bound(points_.begin(), points_.end(), cutoff,
                             [](Timestamp v, const PricePoint& p) { return v < p.minute_ts; });
  if (it == points_.begin()) return std::nullopt;
  return *std::prev(it);
}

std::span<const PricePoint> PriceSeries::between(Timestamp from, Timestamp to) const {
  auto lo = std::lower_bound(points_.begin(), points_.end(), from,
                             [](const PricePoint& p, Timestamp v) { return p.minute_ts < v; });
  auto hi = std::upper_bound(lo, points_.end(), to,
                             [](Timestamp v, const PricePoint& p) { return v < p.minute_ts; });
  return {lo, hi};
}

PriceSeries build_price_series(std::span<const Trade> trades) {
  if (trades.empty()) throw Error(ErrorCode::NoTrades, "cannot build a price series without trades");
  const std::string& id = trades.front().market_id;
  std::vector<PricePoint> points;
  double pq = 0.0;
  double q = 0.0;
  Timestamp current = floor_minute(trades.front().ts);
  for (std::size_t i = 0; i < trades.size(); ++i) {
    const Trade& t = trades[i];
    if (t.market_id != id) {
      throw Error(ErrorCode::MixedMarkets, "trades for '" + id + "' and '" + t.market_id + "' mixed");
    }
    if (i > 0 && t.ts < trades[i - 1].ts) {
      throw Error(ErrorCode::UnsortedInput, id + ": trade timestamps decrease at index " +
                                                std::to_string(i));
    }
    const Timestamp minute = floor_minute(t.ts);
    if (minute != current) {
      points.push_back({current, std::clamp(pq / q, 0.0, 1.0), q});
      current = minute;
      pq = 0.0;
      q = 0.0;
    }
    pq += t.price * t.size;
    q += t.size;
  }
  points.push_back({current, std::clamp(pq / q, 0.0, 1.0), q});
  return PriceSeries(id, std::move(points));
}

std::vector<MarketRecord> volume_cutoff_filter(std::span<const MarketRecord> markets,
                                               double threshold_usdc) {
  std::vector<MarketRecord> kept;
  for (const auto& m : markets) {
    if (m.total_volume_usdc >= threshold_usdc) kept.push_back(m);
  }
  return kept;
}

std::vector<Trade> top_winning_trades(std::span<const Trade> trades, Outcome outcome,
                                      std::size_t k) {
  const Side winning = outcome == Outcome::Yes ? Side::BuyYes : Side::SellYes;
  std::vector<Trade> winners;
  for (const auto& t : trades) {
    if (t.side == winning) winners.push_back(t);
  }
  std::stable_sort(winners.begin(), winners.end(), [](const Trade& a, const Trade& b) {
    if (a.size != b.size) return a.size > b.size;
    if (a.ts != b.ts) return a.ts < b.ts;
    return a.wallet_id < b.wallet_id;
  });
  if (winners.size() > k) winners.resize(k);
  return winners;
}

}  // namespace infoflow
