#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "infoflow/market.hpp"

namespace infoflow {

enum class ScopeFlag { EdgeEffect, TrivialResolution, AnchorUnstable };
std::string_view to_string(ScopeFlag f);

struct ScopeConfig {
  double epsilon = 0.05;
  double edge_band = 0.4;  // p_open must satisfy |p_open - 0.5| <= edge_band
  double anchor_robustness_max_delta = 0.25;
  /// Resolution-anchored proxy offsets used to complete the anchor set when a
  /// market has fewer than two anchors of its own.
  std::vector<double> proxy_offsets_hours{24.0, 6.0};

  void validate() const;
};

/// Default multi-window set: 30min, 2h, 6h, 24h, 7d.
std::vector<Seconds> default_ils_windows();

/// The score is a function of three numbers only.
struct IlsParts {
  double p_open = 0.0;
  double p_news = 0.0;
  double outcome = 0.0;
  double delta_pre = 0.0;
  double delta_total = 0.0;
  std::optional<double> ils;  // nullopt = trivial resolution
  bool edge_effect = false;
};

/// Pure score. Trivial when |delta_total| < epsilon; edge effect when
/// |p_open - 0.5| > edge_band.
IlsParts ils_from_prices(double p_open, double p_news, double outcome, const ScopeConfig& cfg);

struct WindowIls {
  Seconds window{};
  std::optional<double> ils;  // nullopt = denominator below epsilon
  double p_start = 0.0;
  bool edge_effect = false;
};

struct WindowSet {
  std::vector<WindowIls> windows;   // reported windows, ascending
  std::vector<Seconds> omitted;     // windows extending before T_open
};

struct TimeToNews {
  std::vector<Seconds> pre_news;   // T_news - t_i >= 0
  std::vector<Seconds> post_news;  // negative gaps, kept separately
};

struct AnchorSensitivity {
  bool robust = true;
  std::vector<std::optional<double>> per_anchor_ils;
  double max_abs_difference = 0.0;
};

struct LeakageLabel {
  std::string market_id;
  std::optional<double> ils;
  double p_open = 0.0;
  double p_news = 0.0;
  double delta_pre = 0.0;
  double delta_total = 0.0;
  std::set<ScopeFlag> scope_flags;
  WindowSet ils_windows;
  std::optional<AnchorSensitivity> anchors;
  std::optional<double> v_pre;
  std::optional<double> max_pre_news_jump;
  std::optional<double> hhi_top10;
  TimeToNews time_to_news;
  std::optional<double> mean_wallet_novelty;
  std::size_t wallet_profiles_missing = 0;
};

/// ILS plus scope flags for an event-resolved market.
/// Throws WrongResolutionType, AnchorOutOfRange.
LeakageLabel compute_ils(const MarketRecord& market, const PriceSeries& series,
                         const NewsAnchor& anchor, const ScopeConfig& cfg);

WindowSet compute_ils_windows(const MarketRecord& market, const PriceSeries& series,
                              const NewsAnchor& anchor, const ScopeConfig& cfg,
                              std::span<const Seconds> windows);

/// Robust iff every defined per-anchor ILS shares a sign (zero is compatible
/// with either) and all pairwise gaps are <= anchor_robustness_max_delta.
/// Throws InsufficientAnchors for fewer than two anchors.
AnchorSensitivity anchor_sensitivity(const MarketRecord& market, const PriceSeries& series,
                                     std::span<const NewsAnchor> anchors, const ScopeConfig& cfg);

/// Share of USDC notional traded strictly before T_news among trades at or
/// before T_resolve. Throws ZeroVolume.
double pre_news_volume_share(std::span<const Trade> trades, Timestamp t_news, Timestamp t_resolve);

/// Largest absolute change between consecutive minute VWAPs whose minutes lie
/// in [T_open, T_news] (T_open truncated to its minute). nullopt with < 2 points.
std::optional<double> max_pre_news_jump(const PriceSeries& series, Timestamp t_open,
                                        Timestamp t_news);

/// HHI of size shares among the given top-k winning trades. Throws NoWinningTrades.
double wallet_concentration_hhi(std::span<const Trade> winning_trades);

TimeToNews time_to_news_gaps(std::span<const Trade> winning_trades, Timestamp t_news);

}  // namespace infoflow
