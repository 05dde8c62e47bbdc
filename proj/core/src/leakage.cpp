#include "infoflow/leakage.hpp"

#include <algorithm>
#include <cmath>

#include "infoflow/error.hpp"

namespace infoflow {

namespace {

// Boundary values such as p_open = 0.9 must stay inside the band despite
// binary rounding of 0.9 - 0.5.
constexpr double kBoundarySlack = 1e-12;

bool is_edge(double p, const ScopeConfig& cfg) {
  return std::abs(p - 0.5) > cfg.edge_band + kBoundarySlack;
}

void check_anchor(const MarketRecord& market, const NewsAnchor& anchor) {
  if (anchor.t_news < market.open_ts || anchor.t_news > market.resolve_ts) {
    throw Error(ErrorCode::AnchorOutOfRange,
                market.market_id + ": anchor " + format_iso8601(anchor.t_news) +
                    " outside [open_ts, resolve_ts]");
  }
}

}  // namespace

std::string_view to_string(ScopeFlag f) {
  switch (f) {
    case ScopeFlag::EdgeEffect: return "EDGE_EFFECT";
    case ScopeFlag::TrivialResolution: return "TRIVIAL_RESOLUTION";
    case ScopeFlag::AnchorUnstable: return "ANCHOR_UNSTABLE";
  }
  return "?";
}

void ScopeConfig::validate() const {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::ConfigError, "epsilon must be > 0");
  if (!(edge_band > 0.0 && edge_band < 0.5)) {
    throw Error(ErrorCode::ConfigError, "edge_band must lie in (0, 0.5)");
  }
  if (!(anchor_robustness_max_delta >= 0.0)) {
    throw Error(ErrorCode::ConfigError, "anchor_robustness_max_delta must be >= 0");
  }
  for (double h : proxy_offsets_hours) {
    if (!(h > 0.0)) throw Error(ErrorCode::ConfigError, "proxy offsets must be positive");
  }
}

std::vector<Seconds> default_ils_windows() {
  return {30 * kMinute, 2 * kHour, 6 * kHour, 24 * kHour, 7 * kDay};
}

IlsParts ils_from_prices(double p_open, double p_news, double outcome, const ScopeConfig& cfg) {
  IlsParts parts;
  parts.p_open = p_open;
  parts.p_news = p_news;
  parts.outcome = outcome;
  parts.delta_pre = p_news - p_open;
  parts.delta_total = outcome - p_open;
  if (!(std::abs(parts.delta_total) < cfg.epsilon)) parts.ils = parts.delta_pre / parts.delta_total;
  parts.edge_effect = is_edge(p_open, cfg);
  return parts;
}

LeakageLabel compute_ils(const MarketRecord& market, const PriceSeries& series,
                         const NewsAnchor& anchor, const ScopeConfig& cfg) {
  if (market.resolution_type != ResolutionType::EventResolved) {
    throw Error(ErrorCode::WrongResolutionType,
                market.market_id + " is " + std::string(to_string(market.resolution_type)));
  }
  check_anchor(market, anchor);
  if (series.empty()) throw Error(ErrorCode::NoTrades, market.market_id + ": empty price series");

  const auto parts = ils_from_prices(series.front().vwap, series.price_at(anchor.t_news),
                                     outcome_value(market.outcome), cfg);
  LeakageLabel label;
  label.market_id = market.market_id;
  label.p_open = parts.p_open;
  label.p_news = parts.p_news;
  label.delta_pre = parts.delta_pre;
  label.delta_total = parts.delta_total;
  label.ils = parts.ils;
  if (!parts.ils) label.scope_flags.insert(ScopeFlag::TrivialResolution);
  if (parts.edge_effect) label.scope_flags.insert(ScopeFlag::EdgeEffect);
  return label;
}

WindowSet compute_ils_windows(const MarketRecord& market, const PriceSeries& series,
                              const NewsAnchor& anchor, const ScopeConfig& cfg,
                              std::span<const Seconds> windows) {
  check_anchor(market, anchor);
  std::vector<Seconds> sorted(windows.begin(), windows.end());
  std::sort(sorted.begin(), sorted.end());

  WindowSet out;
  const double p_news = series.price_at(anchor.t_news);
  const double outcome = outcome_value(market.outcome);
  for (Seconds w : sorted) {
    const Timestamp start = anchor.t_news - w;
    if (start < market.open_ts || start < series.front().minute_ts) {
      out.omitted.push_back(w);
      continue;
    }
    const auto parts = ils_from_prices(series.price_at(start), p_news, outcome, cfg);
    out.windows.push_back({w, parts.ils, parts.p_open, parts.edge_effect});
  }
  return out;
}

AnchorSensitivity anchor_sensitivity(const MarketRecord& market, const PriceSeries& series,
                                     std::span<const NewsAnchor> anchors, const ScopeConfig& cfg) {
  if (anchors.size() < 2) {
    throw Error(ErrorCode::InsufficientAnchors,
                market.market_id + ": anchor sensitivity needs at least two anchors");
  }
  AnchorSensitivity out;
  for (const auto& a : anchors) out.per_anchor_ils.push_back(compute_ils(market, series, a, cfg).ils);

  bool positive = false;
  bool negative = false;
  for (std::size_t i = 0; i < out.per_anchor_ils.size(); ++i) {
    const auto& a = out.per_anchor_ils[i];
    if (!a) continue;
    positive |= *a > 0.0;
    negative |= *a < 0.0;
    for (std::size_t j = i + 1; j < out.per_anchor_ils.size(); ++j) {
      const auto& b = out.per_anchor_ils[j];
      if (b) out.max_abs_difference = std::max(out.max_abs_difference, std::abs(*a - *b));
    }
  }
  out.robust = !(positive && negative) &&
               out.max_abs_difference <= cfg.anchor_robustness_max_delta + kBoundarySlack;
  return out;
}

double pre_news_volume_share(std::span<const Trade> trades, Timestamp t_news, Timestamp t_resolve) {
  double pre = 0.0;
  double total = 0.0;
  for (const auto& t : trades) {
    if (t.ts > t_resolve) continue;
    total += t.notional();
    if (t.ts < t_news) pre += t.notional();
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroVolume, "no notional traded before resolution");
  return std::clamp(pre / total, 0.0, 1.0);
}

std::optional<double> max_pre_news_jump(const PriceSeries& series, Timestamp t_open,
                                        Timestamp t_news) {
  const auto pts = series.between(floor_minute(t_open), t_news);
  if (pts.size() < 2) return std::nullopt;
  double best = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    best = std::max(best, std::abs(pts[i].vwap - pts[i - 1].vwap));
  }
  return best;
}

double wallet_concentration_hhi(std::span<const Trade> winning_trades) {
  if (winning_trades.empty()) throw Error(ErrorCode::NoWinningTrades, "no winning trades");
  double total = 0.0;
  for (const auto& t : winning_trades) total += t.size;
  double hhi = 0.0;
  for (const auto& t : winning_trades) {
    const double s = t.size / total;
    hhi += s * s;
  }
  return std::min(hhi, 1.0);
}

TimeToNews time_to_news_gaps(std::span<const Trade> winning_trades, Timestamp t_news) {
  TimeToNews out;
  for (const auto& t : winning_trades) {
    const Seconds gap = t_news - t.ts;
    (gap.count() >= 0 ? out.pre_news : out.post_news).push_back(gap);
  }
  return out;
}

}  // namespace infoflow
