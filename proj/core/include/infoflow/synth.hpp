#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infoflow/market.hpp"
#include "infoflow/wallet.hpp"

namespace infoflow {

enum class Regime { Null, EventLeak, DeadlineLeak };
std::string_view to_string(Regime r);
Regime parse_regime(std::string_view s);

enum class ArrivalKind { Poisson, Hawkes };

/// Arrival process for trades. Rates are per hour.
struct ArrivalSpec {
  ArrivalKind kind = ArrivalKind::Poisson;
  double rate_per_hour = 4.0;  // Poisson
  double mu = 2.0;             // Hawkes baseline per hour
  double alpha = 1.0;          // Hawkes jump per hour
  double beta = 2.0;           // Hawkes decay per hour
};

/// Who the informed trader is.
struct InformedProfile {
  double age_hours = 12.0;          // wallet age at its first trade
  std::size_t prior_markets = 0;
  std::size_t funding_sources = 1;
  std::size_t wallets = 3;
  double size_multiplier = 5.0;     // relative to a noise trade
  Seconds window = 24 * kHour;      // informed activity before news or event
};

/// Population recipe. Identical specs (including seed) give identical bundles.
struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::size_t n_markets = 100;
  Regime regime = Regime::Null;
  double leak_fraction = 0.0;
  double p_open_lo = 0.3;
  double p_open_hi = 0.7;
  double hazard_lambda = 0.306;    // per day, deadline regime
  double deadline_days = 7.0;      // deadline regime window length
  double life_days_lo = 3.0;
  double life_days_hi = 10.0;
  double lead_hours_lo = 12.0;     // T_resolve - T_news
  double lead_hours_hi = 72.0;
  ArrivalSpec arrival;
  double noise_scale = 0.05;       // logit-space s.d. of trade price noise
  double size_median = 300.0;      // tokens
  double size_sigma = 1.0;         // lognormal shape
  double informed_share = 0.5;     // max share of trades that are informed, scaled by f
  Category category = Category::MilitaryGeopolitics;
  Timestamp start = from_unix(1735689600);  // 2025-01-01T00:00:00Z
  InformedProfile informed;

  void validate() const;
};

nlohmann::json to_json(const ScenarioSpec& s);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

/// Per-market generator facts.
struct GroundTruth {
  std::string market_id;
  Regime regime = Regime::Null;
  double leak_fraction = 0.0;
  double signal_at_news = 0.0;  // information fraction s at T_news
  double p_open_true = 0.0;
  Outcome outcome = Outcome::No;
  std::optional<Timestamp> t_news;
  std::vector<std::string> informed_wallets;
  std::optional<double> event_delay_days;  // raw Exp(lambda) draw
  std::optional<double> theta_open;
  bool pre_open_informed = false;
};

nlohmann::json to_json(const GroundTruth& g);

struct SynthBundle {
  std::vector<MarketRecord> markets;
  std::vector<Trade> trades;  // grouped by market, time-ordered within market
  std::vector<WalletProfile> wallets;
  std::vector<NewsAnchor> anchors;
  std::vector<GroundTruth> truth;
};

/// Throws ConfigError for an invalid spec.
SynthBundle gen_population(const ScenarioSpec& spec);

/// Writes markets/trades/wallets/anchors/ground_truth .jsonl and spec.json.
void write_bundle(const SynthBundle& bundle, const ScenarioSpec& spec,
                  const std::filesystem::path& dir);

/// Arrival times in [0, horizon] of a Hawkes process with kernel
/// alpha * exp(-beta u), simulated by thinning. Throws Unstable when
/// alpha / beta >= 1, ConfigError for negative parameters.
std::vector<double> gen_hawkes_arrivals(double mu, double alpha, double beta, double horizon,
                                        std::uint64_t seed);

/// E[(p_s - p0) / (O - p0)] = Var(p_s) / (p0 (1 - p0)): the expected ILS of a
/// latent-Gaussian price revealed up to information fraction s, opening at p0.
double leak_share(double s, double p0);

/// Information fraction s with leak_share(s, p0) = f.
double signal_for_leak(double f, double p0);

}  // namespace infoflow
