#include "infoflow/wallet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "infoflow/error.hpp"

namespace infoflow {

std::size_t WalletProfile::markets_traded_before(Timestamp t) const {
  return static_cast<std::size_t>(
      std::lower_bound(market_first_trade_ts.begin(), market_first_trade_ts.end(), t) -
      market_first_trade_ts.begin());
}

std::optional<double> WalletProfile::funding_concentration_at(Timestamp t) const {
  std::vector<Inflow> visible;
  for (const auto& in : inflows) {
    if (!in.ts || *in.ts <= t) visible.push_back(in);
  }
  double total = 0.0;
  for (const auto& in : visible) total += in.amount;
  if (visible.empty() || !(total > 0.0)) return std::nullopt;
  return funding_concentration(visible);
}

void WalletProfile::normalize() {
  std::sort(market_first_trade_ts.begin(), market_first_trade_ts.end());
}

std::array<double, 4> NoveltyConfig::effective_alphas() const {
  if (!normalize) return alphas;
  const double sum = alphas[0] + alphas[1] + alphas[2] + alphas[3];
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = alphas[i] / sum;
  return out;
}

void NoveltyConfig::validate() const {
  double sum = 0.0;
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw Error(ErrorCode::ConfigError, "novelty weights must be non-negative");
    }
    sum += a;
  }
  if (normalize && !(sum > 0.0)) {
    throw Error(ErrorCode::ConfigError, "novelty weights sum to zero; cannot normalize");
  }
  if (age_threshold.count() <= 0 || late_entry_window.count() <= 0) {
    throw Error(ErrorCode::ConfigError, "novelty thresholds must be positive");
  }
}

double funding_concentration(std::span<const Inflow> inflows) {
  std::map<std::string, double, std::less<>> by_source;
  double total = 0.0;
  for (const auto& in : inflows) {
    if (in.amount < 0.0) throw Error(ErrorCode::InvalidRecord, "negative inflow amount");
    by_source[in.source] += in.amount;
    total += in.amount;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroInflow, "total inflow is zero");
  double hhi = 0.0;
  for (const auto& [source, amount] : by_source) {
    const double share = amount / total;
    hhi += share * share;
  }
  return std::min(hhi, 1.0);
}

NoveltyTerms wallet_novelty_terms(const WalletProfile& profile, Timestamp t, Timestamp t_resolve,
                                  const NoveltyConfig& cfg) {
  if (t < profile.first_tx_ts) {
    throw Error(ErrorCode::BadTimestamp,
                profile.wallet_id + ": trade at " + format_iso8601(t) + " precedes first tx");
  }
  const auto a = cfg.effective_alphas();
  NoveltyTerms terms;
  terms.young = (t - profile.first_tx_ts) < cfg.age_threshold;
  terms.few_markets = profile.markets_traded_before(t) < cfg.prior_markets_threshold;
  terms.c_fund = profile.funding_concentration_at(t).value_or(0.0);
  terms.late_entry = t > t_resolve - cfg.late_entry_window;
  terms.score = a[0] * (terms.young ? 1.0 : 0.0) + a[1] * (terms.few_markets ? 1.0 : 0.0) +
                a[2] * terms.c_fund + a[3] * (terms.late_entry ? 1.0 : 0.0);
  return terms;
}

double wallet_novelty(const WalletProfile& profile, Timestamp t, Timestamp t_resolve,
                      const NoveltyConfig& cfg) {
  return wallet_novelty_terms(profile, t, t_resolve, cfg).score;
}

MeanNovelty mean_wallet_novelty(const MarketRecord& market, std::span<const Trade> winning_trades,
                                const WalletIndex& profiles, const NoveltyConfig& cfg) {
  MeanNovelty out;
  double sum = 0.0;
  for (const auto& trade : winning_trades) {
    auto it = profiles.find(trade.wallet_id);
    if (it == profiles.end()) {
      out.per_trade.emplace_back(std::nullopt);
      ++out.missing_profiles;
      continue;
    }
    const double wn = wallet_novelty(it->second, trade.ts, market.resolve_ts, cfg);
    out.per_trade.emplace_back(wn);
    sum += wn;
    ++out.scored;
  }
  if (out.scored > 0) out.mean = sum / static_cast<double>(out.scored);
  return out;
}

}  // namespace infoflow
