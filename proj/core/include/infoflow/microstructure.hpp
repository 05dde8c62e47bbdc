#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "infoflow/market.hpp"

namespace infoflow {

struct WindowSpec {
  std::vector<Seconds> oi_windows{5 * kMinute, 15 * kMinute, kHour};
  /// Token volume per VPIN bucket; nullopt means "use the per-category default".
  std::optional<double> vpin_bucket_volume;
  std::map<Category, double> vpin_bucket_by_category;
  std::size_t vpin_trailing_buckets = 50;
  std::size_t lambda_window = 200;  // trades
  std::size_t vr_k = 6;
  Seconds vr_delta = 5 * kMinute;
  Seconds ts_window = kHour;
  Seconds kurtosis_window = 24 * kHour;
  Seconds hawkes_window = 24 * kHour;
  bool hawkes = true;

  /// Bucket volume for a category: explicit value, else per-category entry.
  std::optional<double> bucket_volume_for(Category c) const;
  void validate() const;
};

struct MicroFeatures {
  Timestamp at{};
  std::map<Seconds, std::optional<double>> oi;
  std::optional<double> vpin;
  std::optional<double> kyle_lambda;
  std::optional<double> vr;
  std::size_t vr_clipped = 0;
  std::optional<double> ts;
  std::optional<double> size_kurtosis;
  std::optional<double> hawkes_branching;
};

// Window functions receive only the slice they may see. Each throws the
// listed error code when the feature is undefined on that slice.

/// (V_buy - V_sell) / (V_buy + V_sell) on token volume. Throws Undefined.
double order_imbalance(std::span<const Trade> window);

/// 1 - |V_buy - V_sell| / (V_buy + V_sell). Throws Undefined.
double two_sidedness(std::span<const Trade> window);

/// Mean bucket toxicity over the last min(N, available) complete buckets.
/// Trades straddling a boundary are split pro-rata. Throws InsufficientVolume.
double vpin(std::span<const Trade> trades, double bucket_volume, std::size_t trailing);

/// Per-bucket |V_buy - V_sell| / V for every complete bucket.
std::vector<double> vpin_toxicities(std::span<const Trade> trades, double bucket_volume);

struct OlsFit {
  double intercept = 0.0;
  double slope = 0.0;
  std::optional<double> slope_se;  // needs >= 3 observations
  std::size_t n = 0;
};

/// y = a + b x by least squares. Throws Degenerate when x has no variance.
OlsFit ols(std::span<const double> x, std::span<const double> y);

/// Regresses the trade-to-trade price change on signed token size (BUY_YES
/// positive) with an intercept. Throws Degenerate.
OlsFit kyle_lambda(std::span<const Trade> window);

struct VarianceRatio {
  double value = 0.0;
  std::size_t returns = 0;
  std::size_t clipped = 0;  // grid prices moved into [0.001, 0.999]
};

/// Var of overlapping k-sums over k times the one-step variance.
/// Throws Undefined with fewer than 2k returns or zero one-step variance.
double variance_ratio_returns(std::span<const double> log_returns, std::size_t k);

/// Log returns on a forward-filled grid of step delta from the first minute
/// up to t. Throws Undefined.
VarianceRatio variance_ratio(std::span<const PricePoint> points, std::size_t k, Seconds delta,
                             Timestamp t);
VarianceRatio variance_ratio(const PriceSeries& series, std::size_t k, Seconds delta, Timestamp t);

/// Bias-corrected sample excess kurtosis (G2) of token sizes. Throws Undefined
/// for fewer than 4 trades or zero variance.
double trade_size_kurtosis(std::span<const Trade> window);
double excess_kurtosis_g2(std::span<const double> x);

/// Trades with ts in (t - width, t]. Input sorted by ts.
std::span<const Trade> window_slice(std::span<const Trade> sorted, Timestamp t, Seconds width);

/// The last n trades with ts <= t.
std::span<const Trade> last_n_slice(std::span<const Trade> sorted, Timestamp t, std::size_t n);

/// Trades with ts <= t.
std::span<const Trade> up_to(std::span<const Trade> sorted, Timestamp t);

/// Every feature at t from trades sorted by ts; later trades are ignored.
/// Undefined features are left empty.
MicroFeatures compute_features(std::span<const Trade> sorted, Timestamp t, const WindowSpec& spec,
                               Category category = Category::Other);

/// Per-category median daily token volume divided by 50.
std::map<Category, double> default_vpin_buckets(
    std::span<const MarketRecord> markets, const std::map<std::string, double>& token_volume);

/// Streaming per-market engine. One writer pushes trades in time order;
/// latest() may be read from other threads.
class MicroEngine {
 public:
  MicroEngine(WindowSpec spec, Category category = Category::Other);

  /// Appends a trade. Throws UnsortedInput if it precedes the last one.
  void push(const Trade& trade);

  /// Features at t using pushed trades with ts <= t; also stored as latest.
  MicroFeatures evaluate(Timestamp t);

  /// Pushes all trades and evaluates at every minute boundary from the
  /// first trade's minute + 1 through the last trade's minute + 1.
  std::vector<MicroFeatures> stream(std::span<const Trade> trades);

  std::optional<MicroFeatures> latest() const;

 private:
  WindowSpec spec_;
  Category category_;
  std::vector<Trade> trades_;
  mutable std::shared_mutex mu_;
  std::optional<MicroFeatures> latest_;
};

}  // namespace infoflow
