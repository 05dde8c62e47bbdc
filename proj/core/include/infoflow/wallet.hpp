#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoflow/market.hpp"

namespace infoflow {

struct Inflow {
  std::string source;
  double amount = 0.0;
  std::optional<Timestamp> ts;  // absent = known before any trade we score
};

/// On-chain context for one wallet. market_first_trade_ts holds the first
/// trade time in every market the wallet has touched, sorted ascending.
struct WalletProfile {
  std::string wallet_id;
  Timestamp first_tx_ts{};
  std::vector<Timestamp> market_first_trade_ts;
  std::vector<Inflow> inflows;

  /// Distinct markets entered strictly before t.
  std::size_t markets_traded_before(Timestamp t) const;

  /// Source-share HHI over inflows observable at t; nullopt when none are.
  std::optional<double> funding_concentration_at(Timestamp t) const;

  void normalize();  // sorts market_first_trade_ts
};

struct NoveltyConfig {
  std::array<double, 4> alphas{0.25, 0.25, 0.25, 0.25};
  bool normalize = true;
  Seconds age_threshold = 48 * kHour;
  std::size_t prior_markets_threshold = 3;
  Seconds late_entry_window = 2 * kHour;

  /// Weights actually applied (divided by their sum when normalize is set).
  std::array<double, 4> effective_alphas() const;
  void validate() const;
};

/// Herfindahl index of per-source inflow shares. Throws ZeroInflow.
double funding_concentration(std::span<const Inflow> inflows);

struct NoveltyTerms {
  bool young = false;
  bool few_markets = false;
  double c_fund = 0.0;
  bool late_entry = false;
  double score = 0.0;
};

/// Weighted composite of wallet age, prior participation, funding
/// concentration and late entry. A wallet with no observable inflows
/// contributes c_fund = 0. Throws BadTimestamp when t < first_tx_ts.
NoveltyTerms wallet_novelty_terms(const WalletProfile& profile, Timestamp t, Timestamp t_resolve,
                                  const NoveltyConfig& cfg);

double wallet_novelty(const WalletProfile& profile, Timestamp t, Timestamp t_resolve,
                      const NoveltyConfig& cfg);

using WalletIndex = std::map<std::string, WalletProfile, std::less<>>;

struct MeanNovelty {
  std::optional<double> mean;  // nullopt when no trade had a profile
  std::size_t scored = 0;
  std::size_t missing_profiles = 0;
  std::vector<std::optional<double>> per_trade;
};

/// Trade-level mean over the given winning trades (a wallet appearing twice
/// counts twice). Trades without a profile are excluded and counted.
MeanNovelty mean_wallet_novelty(const MarketRecord& market, std::span<const Trade> winning_trades,
                                const WalletIndex& profiles, const NoveltyConfig& cfg);

}  // namespace infoflow
