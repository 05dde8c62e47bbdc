#include "infoflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "infoflow/deadline.hpp"
#include "infoflow/error.hpp"
#include "infoflow/io.hpp"
#include "infoflow/normal.hpp"
#include "infoflow/rng.hpp"

namespace infoflow {

namespace {

constexpr double kPriceLo = 0.001;
constexpr double kPriceHi = 0.999;
constexpr std::size_t kNoiseWallets = 20;
constexpr double kPostNewsJump = 0.8;
constexpr double kFinalReveal = 0.98;

double logit(double p) { return std::log(p / (1.0 - p)); }
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string market_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "syn-%06zu", i);
  return buf;
}

Timestamp round_minute(Timestamp base, double minutes) {
  return base + kMinute * static_cast<std::int64_t>(std::llround(minutes));
}

/// Trade arrival offsets (seconds) within [0, horizon).
std::vector<double> arrivals(const ArrivalSpec& a, double horizon, Rng& rng) {
  if (a.kind == ArrivalKind::Hawkes) {
    return gen_hawkes_arrivals(a.mu / 3600.0, a.alpha / 3600.0, a.beta / 3600.0, horizon, rng());
  }
  std::exponential_distribution<double> gap(a.rate_per_hour / 3600.0);
  std::vector<double> out;
  for (double t = gap(rng); t < horizon; t += gap(rng)) out.push_back(t);
  return out;
}

struct Context {
  const ScenarioSpec& spec;
  std::size_t index;
  Rng rng;
  SynthBundle& out;
  std::string id;
};

double noisy(double p, double noise_scale, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  const double clipped = std::clamp(p, kPriceLo, kPriceHi);
  return std::clamp(logistic(logit(clipped) + noise_scale * z(rng)), kPriceLo, kPriceHi);
}

double trade_size(const ScenarioSpec& spec, Rng& rng) {
  std::lognormal_distribution<double> d(std::log(spec.size_median), spec.size_sigma);
  return d(rng);
}

WalletProfile noise_wallet(const std::string& id, Timestamp open, std::size_t j) {
  WalletProfile w;
  w.wallet_id = id + "-n" + std::to_string(j);
  w.first_tx_ts = open - 700 * kDay;
  for (int k = 10; k >= 1; --k) w.market_first_trade_ts.push_back(open - k * 10 * kDay);
  for (int k = 0; k < 4; ++k) {
    w.inflows.push_back({id + "-src" + std::to_string(k), 1000.0, w.first_tx_ts});
  }
  return w;
}

WalletProfile informed_wallet(const std::string& id, const InformedProfile& p, std::size_t j,
                              Timestamp first_tx) {
  WalletProfile w;
  w.wallet_id = id + "-i" + std::to_string(j);
  w.first_tx_ts = first_tx;
  for (std::size_t k = 0; k < p.prior_markets; ++k) {
    w.market_first_trade_ts.push_back(first_tx + kMinute * static_cast<std::int64_t>(k + 1));
  }
  for (std::size_t k = 0; k < p.funding_sources; ++k) {
    w.inflows.push_back({w.wallet_id + "-fund" + std::to_string(k), 5000.0, first_tx});
  }
  return w;
}

void finish_market(Context& c, MarketRecord m, std::vector<Trade> trades) {
  double notional = 0.0;
  for (const auto& t : trades) notional += t.notional();
  m.total_volume_usdc = notional;
  c.out.markets.push_back(std::move(m));
  c.out.trades.insert(c.out.trades.end(), trades.begin(), trades.end());
}

void gen_event_market(Context& c) {
  const auto& spec = c.spec;
  auto& rng = c.rng;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  const bool leak = spec.regime == Regime::EventLeak;
  const double f = leak ? spec.leak_fraction : 0.0;

  const Timestamp open = spec.start + kHour * static_cast<std::int64_t>(c.index);
  const double life_min = 1440.0 * (spec.life_days_lo + (spec.life_days_hi - spec.life_days_lo) * u01(rng));
  const Timestamp resolve = round_minute(open, life_min);
  double lead_min = 60.0 * (spec.lead_hours_lo + (spec.lead_hours_hi - spec.lead_hours_lo) * u01(rng));
  lead_min = std::min(lead_min, life_min - 120.0);
  const Timestamp t_news = round_minute(resolve, -lead_min);

  const double p0 = spec.p_open_lo + (spec.p_open_hi - spec.p_open_lo) * u01(rng);
  const double mu = normal_quantile(p0);
  const double s_news = signal_for_leak(f, p0);
  const double s_jump = s_news + kPostNewsJump * (1.0 - s_news);
  const double s_end = s_news + kFinalReveal * (1.0 - s_news);
  // Pre-news information reaches s_news one minute before T_news, where a
  // trade is always printed, so p(T_news) carries the full injected fraction.
  const Timestamp t_last = t_news - kMinute;
  const double pre_span = static_cast<double>((t_last - open).count());
  const double post_span = static_cast<double>((resolve - t_news).count());
  auto info_at = [&](Timestamp t) {
    if (t < t_news) return s_news * std::min(1.0, static_cast<double>((t - open).count()) / pre_span);
    return s_jump + (s_end - s_jump) * static_cast<double>((t - t_news).count()) / post_span;
  };

  std::vector<double> offsets{0.0, static_cast<double>((t_last - open).count())};
  const auto extra = arrivals(spec.arrival, static_cast<double>((resolve - open).count()), rng);
  offsets.insert(offsets.end(), extra.begin(), extra.end());
  std::sort(offsets.begin(), offsets.end());

  // Latent Brownian path sampled at the information fraction of each trade.
  struct Draw {
    Timestamp ts;
    double s;
    double w;
  };
  std::vector<Draw> draws;
  double s_prev = 0.0;
  double w = 0.0;
  for (double off : offsets) {
    const Timestamp ts = open + Seconds{static_cast<std::int64_t>(std::floor(off))};
    if (ts >= resolve) break;
    if (ts >= t_news && ts < t_news + kMinute) continue;
    const double s = std::clamp(info_at(ts), s_prev, 1.0);
    w += std::sqrt(s - s_prev) * z(rng);
    s_prev = s;
    draws.push_back({ts, s, w});
  }
  const double latent = mu + w + std::sqrt(std::max(1.0 - s_prev, 0.0)) * z(rng);
  const Outcome outcome = latent > 0.0 ? Outcome::Yes : Outcome::No;
  const Side winning = outcome == Outcome::Yes ? Side::BuyYes : Side::SellYes;

  GroundTruth g;
  g.market_id = c.id;
  g.regime = spec.regime;
  g.leak_fraction = f;
  g.signal_at_news = s_news;
  g.p_open_true = p0;
  g.outcome = outcome;
  g.t_news = t_news;

  const double informed_p = spec.informed_share * f;
  if (informed_p > 0.0) {
    const Timestamp first_tx = t_news - spec.informed.window -
                               Seconds{static_cast<std::int64_t>(spec.informed.age_hours * 3600.0)};
    for (std::size_t j = 0; j < spec.informed.wallets; ++j) {
      c.out.wallets.push_back(informed_wallet(c.id, spec.informed, j, first_tx));
      g.informed_wallets.push_back(c.out.wallets.back().wallet_id);
    }
  }
  for (std::size_t j = 0; j < kNoiseWallets; ++j) c.out.wallets.push_back(noise_wallet(c.id, open, j));

  std::uniform_int_distribution<std::size_t> pick_noise(0, kNoiseWallets - 1);
  std::uniform_int_distribution<std::size_t> pick_informed(
      0, std::max<std::size_t>(spec.informed.wallets, 1) - 1);
  std::vector<Trade> trades;
  trades.reserve(draws.size());
  for (const auto& d : draws) {
    const double denom = std::sqrt(std::max(1.0 - d.s, 1e-300));
    const double p_true = normal_cdf((mu + d.w) / denom);
    Trade t;
    t.ts = d.ts;
    t.market_id = c.id;
    t.price = noisy(p_true, spec.noise_scale, rng);
    t.size = trade_size(spec, rng);
    const bool in_window = d.ts < t_news && d.ts >= t_news - spec.informed.window;
    if (in_window && informed_p > 0.0 && u01(rng) < informed_p) {
      t.side = winning;
      t.size *= spec.informed.size_multiplier;
      t.wallet_id = g.informed_wallets[pick_informed(rng)];
    } else {
      t.side = u01(rng) < 0.5 ? Side::BuyYes : Side::SellYes;
      t.wallet_id = c.id + "-n" + std::to_string(pick_noise(rng));
    }
    trades.push_back(std::move(t));
  }

  MarketRecord m;
  m.market_id = c.id;
  m.question = "Will Country-" + std::to_string(c.index) + " announce a ceasefire?";
  m.category = spec.category;
  m.open_ts = open;
  m.resolve_ts = resolve;
  m.outcome = outcome;
  m.resolution_type = ResolutionType::EventResolved;

  NewsAnchor a;
  a.market_id = c.id;
  a.t_news = t_news;
  a.tier = AnchorTier::Article;
  a.confidence = 1.0;
  c.out.anchors.push_back(a);
  c.out.truth.push_back(std::move(g));
  finish_market(c, std::move(m), std::move(trades));
}

void gen_deadline_market(Context& c) {
  const auto& spec = c.spec;
  auto& rng = c.rng;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::exponential_distribution<double> delay_dist(spec.hazard_lambda);
  const double f = spec.leak_fraction;

  const Timestamp open = spec.start + kHour * static_cast<std::int64_t>(c.index);
  const Timestamp deadline = round_minute(open, spec.deadline_days * 1440.0);
  const double delay = delay_dist(rng);
  const double theta_open = -std::expm1(-spec.hazard_lambda * to_days(deadline - open));
  const Timestamp t_event =
      open + Seconds{std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(delay * 86400.0)))};
  const bool yes = t_event <= deadline;
  const Timestamp resolve = (yes ? t_event : deadline) + kHour;

  GroundTruth g;
  g.market_id = c.id;
  g.regime = Regime::DeadlineLeak;
  g.leak_fraction = f;
  g.p_open_true = theta_open;
  g.outcome = yes ? Outcome::Yes : Outcome::No;
  g.event_delay_days = delay;
  g.theta_open = theta_open;

  const Timestamp ramp_start = std::max(open, t_event - spec.informed.window);
  g.pre_open_informed = yes && t_event - spec.informed.window < open;
  const double target = theta_open + f * (1.0 - theta_open);
  const double theta_ramp = yes ? theta_baseline(theta_open, spec.hazard_lambda, ramp_start, open, deadline)
                                : 0.0;
  auto fair_price = [&](Timestamp t) {
    if (yes) {
      if (t >= t_event) return kPriceHi;
      if (t >= ramp_start && t_event > ramp_start) {
        const double frac = static_cast<double>((t - ramp_start).count()) /
                            static_cast<double>((t_event - ramp_start).count());
        return theta_ramp + (target - theta_ramp) * frac;
      }
    }
    if (t >= deadline) return kPriceLo;
    return theta_baseline(theta_open, spec.hazard_lambda, t, open, deadline);
  };

  const double informed_p = yes ? spec.informed_share * f : 0.0;
  if (informed_p > 0.0) {
    const Timestamp first_tx =
        ramp_start - Seconds{static_cast<std::int64_t>(spec.informed.age_hours * 3600.0)};
    for (std::size_t j = 0; j < spec.informed.wallets; ++j) {
      c.out.wallets.push_back(informed_wallet(c.id, spec.informed, j, first_tx));
      g.informed_wallets.push_back(c.out.wallets.back().wallet_id);
    }
  }
  for (std::size_t j = 0; j < kNoiseWallets; ++j) c.out.wallets.push_back(noise_wallet(c.id, open, j));

  std::vector<double> offsets{0.0};
  const auto extra = arrivals(spec.arrival, static_cast<double>((resolve - open).count()), rng);
  offsets.insert(offsets.end(), extra.begin(), extra.end());

  std::uniform_int_distribution<std::size_t> pick_noise(0, kNoiseWallets - 1);
  std::uniform_int_distribution<std::size_t> pick_informed(
      0, std::max<std::size_t>(spec.informed.wallets, 1) - 1);
  std::vector<Trade> trades;
  for (double off : offsets) {
    const Timestamp ts = open + Seconds{static_cast<std::int64_t>(std::floor(off))};
    if (ts >= resolve) break;
    if (yes && ts >= t_event && ts < t_event + kMinute) continue;
    Trade t;
    t.ts = ts;
    t.market_id = c.id;
    t.price = noisy(fair_price(ts), spec.noise_scale, rng);
    t.size = trade_size(spec, rng);
    if (informed_p > 0.0 && ts >= ramp_start && ts < t_event && u01(rng) < informed_p) {
      t.side = Side::BuyYes;
      t.size *= spec.informed.size_multiplier;
      t.wallet_id = g.informed_wallets[pick_informed(rng)];
    } else {
      t.side = u01(rng) < 0.5 ? Side::BuyYes : Side::SellYes;
      t.wallet_id = c.id + "-n" + std::to_string(pick_noise(rng));
    }
    trades.push_back(std::move(t));
  }

  MarketRecord m;
  m.market_id = c.id;
  m.question = "Will Country-" + std::to_string(c.index) + " strike Country-" +
               std::to_string(c.index + 1) + " by " + format_iso8601(deadline).substr(0, 10) + "?";
  m.category = spec.category;
  m.open_ts = open;
  m.resolve_ts = resolve;
  m.deadline_ts = deadline;
  m.outcome = g.outcome;
  m.resolution_type = ResolutionType::DeadlineResolved;

  NewsAnchor a;
  a.market_id = c.id;
  a.t_news = yes ? t_event : deadline;
  a.tier = yes ? AnchorTier::EventOccurrence : AnchorTier::DeadlineExpiry;
  c.out.anchors.push_back(a);
  if (yes) g.t_news = t_event;
  c.out.truth.push_back(std::move(g));
  finish_market(c, std::move(m), std::move(trades));
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Null: return "null";
    case Regime::EventLeak: return "event_leak";
    case Regime::DeadlineLeak: return "deadline_leak";
  }
  return "?";
}

Regime parse_regime(std::string_view s) {
  if (s == "null") return Regime::Null;
  if (s == "event_leak") return Regime::EventLeak;
  if (s == "deadline_leak") return Regime::DeadlineLeak;
  throw Error(ErrorCode::ConfigError, "unknown regime '" + std::string(s) + "'");
}

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); };
  if (n_markets == 0) fail("n_markets must be positive");
  if (!(leak_fraction >= 0.0 && leak_fraction <= 1.0)) fail("leak_fraction must lie in [0, 1]");
  if (!(p_open_lo > 0.0 && p_open_lo <= p_open_hi && p_open_hi < 1.0)) {
    fail("p_open range must satisfy 0 < lo <= hi < 1");
  }
  if (!(hazard_lambda > 0.0)) fail("hazard_lambda must be positive");
  if (!(deadline_days > 0.0)) fail("deadline_days must be positive");
  if (!(life_days_lo > 0.0 && life_days_lo <= life_days_hi)) fail("life range invalid");
  if (!(lead_hours_lo > 0.0 && lead_hours_lo <= lead_hours_hi)) fail("lead range invalid");
  if (!(lead_hours_lo + 2.0 < life_days_lo * 24.0)) fail("lead must leave at least two hours before resolution");
  if (!(noise_scale >= 0.0)) fail("noise_scale must be >= 0");
  if (!(size_median > 0.0 && size_sigma >= 0.0)) fail("size distribution invalid");
  if (!(informed_share >= 0.0 && informed_share <= 1.0)) fail("informed_share must lie in [0, 1]");
  if (arrival.kind == ArrivalKind::Poisson && !(arrival.rate_per_hour > 0.0)) {
    fail("arrival rate must be positive");
  }
  if (arrival.kind == ArrivalKind::Hawkes) {
    if (!(arrival.mu > 0.0 && arrival.alpha >= 0.0 && arrival.beta > 0.0)) {
      fail("hawkes parameters must be positive");
    }
    if (!(arrival.alpha < arrival.beta)) fail("hawkes arrivals must be subcritical");
  }
  if (informed.window.count() <= 0 || informed.age_hours < 0.0 || informed.size_multiplier <= 0.0) {
    fail("informed profile invalid");
  }
  if (regime != Regime::Null && leak_fraction > 0.0 && informed_share > 0.0 && informed.wallets == 0) {
    fail("informed flow needs at least one informed wallet");
  }
}

nlohmann::json to_json(const ScenarioSpec& s) {
  nlohmann::json arrival = {{"kind", s.arrival.kind == ArrivalKind::Hawkes ? "hawkes" : "poisson"},
                            {"rate_per_hour", s.arrival.rate_per_hour},
                            {"mu", s.arrival.mu},
                            {"alpha", s.arrival.alpha},
                            {"beta", s.arrival.beta}};
  nlohmann::json informed = {{"age_hours", s.informed.age_hours},
                             {"prior_markets", s.informed.prior_markets},
                             {"funding_sources", s.informed.funding_sources},
                             {"wallets", s.informed.wallets},
                             {"size_multiplier", s.informed.size_multiplier},
                             {"window", format_duration(s.informed.window)}};
  return {{"seed", s.seed},
          {"n_markets", s.n_markets},
          {"regime", to_string(s.regime)},
          {"leak_fraction", s.leak_fraction},
          {"p_open", {s.p_open_lo, s.p_open_hi}},
          {"hazard_lambda", s.hazard_lambda},
          {"deadline_days", s.deadline_days},
          {"life_days", {s.life_days_lo, s.life_days_hi}},
          {"lead_hours", {s.lead_hours_lo, s.lead_hours_hi}},
          {"arrival", arrival},
          {"noise_scale", s.noise_scale},
          {"size_median", s.size_median},
          {"size_sigma", s.size_sigma},
          {"informed_share", s.informed_share},
          {"category", to_string(s.category)},
          {"start", format_iso8601(s.start)},
          {"informed", informed}};
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  ScenarioSpec s;
  try {
    s.seed = j.value("seed", s.seed);
    s.n_markets = j.value("n_markets", s.n_markets);
    if (j.contains("regime")) s.regime = parse_regime(j.at("regime").get<std::string>());
    s.leak_fraction = j.value("leak_fraction", s.leak_fraction);
    if (j.contains("p_open")) {
      s.p_open_lo = j.at("p_open").at(0).get<double>();
      s.p_open_hi = j.at("p_open").at(1).get<double>();
    }
    s.hazard_lambda = j.value("hazard_lambda", s.hazard_lambda);
    s.deadline_days = j.value("deadline_days", s.deadline_days);
    if (j.contains("life_days")) {
      s.life_days_lo = j.at("life_days").at(0).get<double>();
      s.life_days_hi = j.at("life_days").at(1).get<double>();
    }
    if (j.contains("lead_hours")) {
      s.lead_hours_lo = j.at("lead_hours").at(0).get<double>();
      s.lead_hours_hi = j.at("lead_hours").at(1).get<double>();
    }
    if (j.contains("arrival")) {
      const auto& a = j.at("arrival");
      const auto kind = a.value("kind", std::string("poisson"));
      if (kind == "hawkes") {
        s.arrival.kind = ArrivalKind::Hawkes;
      } else if (kind != "poisson") {
        throw Error(ErrorCode::ConfigError, "unknown arrival kind '" + kind + "'");
      }
      s.arrival.rate_per_hour = a.value("rate_per_hour", s.arrival.rate_per_hour);
      s.arrival.mu = a.value("mu", s.arrival.mu);
      s.arrival.alpha = a.value("alpha", s.arrival.alpha);
      s.arrival.beta = a.value("beta", s.arrival.beta);
    }
    s.noise_scale = j.value("noise_scale", s.noise_scale);
    s.size_median = j.value("size_median", s.size_median);
    s.size_sigma = j.value("size_sigma", s.size_sigma);
    s.informed_share = j.value("informed_share", s.informed_share);
    if (j.contains("category")) s.category = parse_category(j.at("category").get<std::string>());
    if (j.contains("start")) s.start = parse_iso8601(j.at("start").get<std::string>());
    if (j.contains("informed")) {
      const auto& p = j.at("informed");
      s.informed.age_hours = p.value("age_hours", s.informed.age_hours);
      s.informed.prior_markets = p.value("prior_markets", s.informed.prior_markets);
      s.informed.funding_sources = p.value("funding_sources", s.informed.funding_sources);
      s.informed.wallets = p.value("wallets", s.informed.wallets);
      s.informed.size_multiplier = p.value("size_multiplier", s.informed.size_multiplier);
      if (p.contains("window")) s.informed.window = parse_duration(p.at("window").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("scenario: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::json to_json(const GroundTruth& g) {
  nlohmann::json j = {{"schema_version", kSchemaVersion},
                      {"market_id", g.market_id},
                      {"regime", to_string(g.regime)},
                      {"leak_fraction", g.leak_fraction},
                      {"signal_at_news", g.signal_at_news},
                      {"p_open_true", g.p_open_true},
                      {"outcome", to_string(g.outcome)},
                      {"informed_wallets", g.informed_wallets},
                      {"pre_open_informed", g.pre_open_informed}};
  j["t_news"] = g.t_news ? nlohmann::json(format_iso8601(*g.t_news)) : nlohmann::json(nullptr);
  j["event_delay_days"] = g.event_delay_days ? nlohmann::json(*g.event_delay_days) : nlohmann::json(nullptr);
  j["theta_open"] = g.theta_open ? nlohmann::json(*g.theta_open) : nlohmann::json(nullptr);
  return j;
}

SynthBundle gen_population(const ScenarioSpec& spec) {
  spec.validate();
  SynthBundle out;
  for (std::size_t i = 0; i < spec.n_markets; ++i) {
    Context c{spec, i, make_rng(spec.seed, i), out, market_id(i)};
    if (spec.regime == Regime::DeadlineLeak) {
      gen_deadline_market(c);
    } else {
      gen_event_market(c);
    }
  }
  return out;
}

void write_bundle(const SynthBundle& b, const ScenarioSpec& spec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto rows = [](const auto& items) {
    std::vector<nlohmann::json> r;
    r.reserve(items.size());
    for (const auto& x : items) r.push_back(to_json(x));
    return r;
  };
  write_jsonl(dir / "markets.jsonl", rows(b.markets));
  write_jsonl(dir / "trades.jsonl", rows(b.trades));
  write_jsonl(dir / "wallets.jsonl", rows(b.wallets));
  write_jsonl(dir / "anchors.jsonl", rows(b.anchors));
  write_jsonl(dir / "ground_truth.jsonl", rows(b.truth));
  write_text(dir / "spec.json", to_json(spec).dump(2) + "\n");
}

std::vector<double> gen_hawkes_arrivals(double mu, double alpha, double beta, double horizon,
                                        std::uint64_t seed) {
  if (!(mu > 0.0) || alpha < 0.0 || !(beta > 0.0) || !(horizon > 0.0)) {
    throw Error(ErrorCode::ConfigError, "hawkes simulation needs mu, beta, horizon > 0 and alpha >= 0");
  }
  if (!(alpha / beta < 1.0)) {
    throw Error(ErrorCode::Unstable, "branching ratio alpha/beta must be below 1");
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<double> out;
  double t = 0.0;
  double excite = 0.0;  // excitation just after time t
  while (true) {
    const double bound = mu + excite;
    const double w = -std::log(1.0 - u01(rng)) / bound;
    excite *= std::exp(-beta * w);
    t += w;
    if (t > horizon) break;
    if (u01(rng) * bound <= mu + excite) {
      out.push_back(t);
      excite += alpha;
    }
  }
  return out;
}

double leak_share(double s, double p0) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw Error(ErrorCode::ConfigError, "p0 must lie in (0, 1)");
  if (s <= 0.0) return 0.0;
  s = std::min(s, 1.0);
  const double mu = normal_quantile(p0);
  const double m2 = mu * mu;
  auto integrand = [m2](double th) { return std::exp(-m2 / (1.0 + std::sin(th))); };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, std::asin(s), 10, 1e-12);
  return integral / (2.0 * std::numbers::pi * p0 * (1.0 - p0));
}

double signal_for_leak(double f, double p0) {
  if (!(f >= 0.0 && f <= 1.0)) throw Error(ErrorCode::ConfigError, "leak fraction must lie in [0, 1]");
  if (f == 0.0) return 0.0;
  if (f == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (leak_share(mid, p0) < f ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace infoflow
