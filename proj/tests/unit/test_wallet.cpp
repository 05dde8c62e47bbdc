#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "infoflow/error.hpp"
#include "infoflow/wallet.hpp"

using namespace infoflow;
using namespace testutil;

namespace {

Inflow src(std::string source, double amount) { return {std::move(source), amount, std::nullopt}; }

WalletProfile profile(Timestamp first_tx, std::size_t prior, std::vector<Inflow> inflows) {
  WalletProfile w;
  w.wallet_id = "w0";
  w.first_tx_ts = first_tx;
  for (std::size_t i = 0; i < prior; ++i) w.market_first_trade_ts.push_back(first_tx + Seconds{static_cast<long long>(i + 1)});
  w.inflows = std::move(inflows);
  return w;
}

}  // namespace

TEST_CASE("wallet novelty examples") {
  const NoveltyConfig cfg;
  const auto t = T0() + 30 * kDay;
  const auto resolve = t + 10 * kDay;

  const auto veteran = profile(t - 400 * kDay, 20, {src("a", 1), src("b", 1), src("c", 1), src("d", 1)});
  const auto v = wallet_novelty_terms(veteran, t, resolve, cfg);
  CHECK_FALSE(v.young);
  CHECK_FALSE(v.few_markets);
  CHECK(v.c_fund == 0.25);
  CHECK(v.score == doctest::Approx(0.0625));

  const auto fresh = profile(t - 2 * kHour, 0, {src("cex", 500)});
  CHECK(wallet_novelty(fresh, t, t + kHour, cfg) == 1.0);

  const auto zero = profile(t - 400 * kDay, 20, {});
  CHECK(wallet_novelty(zero, t, resolve, cfg) == 0.0);
}

TEST_CASE("age threshold boundary") {
  const NoveltyConfig cfg;
  const auto t = T0() + 30 * kDay;
  const auto just_young = profile(t - (48 * kHour - kMinute), 10, {});
  const auto just_old = profile(t - (48 * kHour + kMinute), 10, {});
  const auto exactly = profile(t - 48 * kHour, 10, {});
  CHECK(wallet_novelty_terms(just_young, t, t + kDay, cfg).young);
  CHECK_FALSE(wallet_novelty_terms(just_old, t, t + kDay, cfg).young);
  CHECK_FALSE(wallet_novelty_terms(exactly, t, t + kDay, cfg).young);
  CHECK(wallet_novelty(just_young, t, t + kDay, cfg) == 0.25);
}

TEST_CASE("prior market and late entry thresholds") {
  const NoveltyConfig cfg;
  const auto t = T0() + 30 * kDay;
  CHECK(wallet_novelty_terms(profile(t - 100 * kDay, 2, {}), t, t + kDay, cfg).few_markets);
  CHECK_FALSE(wallet_novelty_terms(profile(t - 100 * kDay, 3, {}), t, t + kDay, cfg).few_markets);
  // Markets entered at or after t do not count.
  auto w = profile(t - 100 * kDay, 0, {});
  w.market_first_trade_ts = {t - kDay, t, t + kDay};
  CHECK(w.markets_traded_before(t) == 1);
  CHECK(wallet_novelty_terms(w, t, t + 2 * kHour, cfg).late_entry == false);
  CHECK(wallet_novelty_terms(w, t, t + 2 * kHour - Seconds{1}, cfg).late_entry);
}

TEST_CASE("funding concentration") {
  CHECK(funding_concentration(std::vector<Inflow>{src("a", 100)}) == 1.0);
  CHECK(funding_concentration(std::vector<Inflow>{src("a", 1), src("b", 1), src("c", 1), src("d", 1)}) == 0.25);
  CHECK(funding_concentration(std::vector<Inflow>{src("a", 60), src("b", 20), src("c", 20)}) == doctest::Approx(0.44));
  CHECK(funding_concentration(std::vector<Inflow>{src("a", 50), src("b", 30), src("c", 20)}) == doctest::Approx(0.38));
  // Repeated sources merge before squaring.
  CHECK(funding_concentration(std::vector<Inflow>{src("a", 30), src("b", 40), src("a", 30)}) == doctest::Approx(0.52));
  try {
    funding_concentration(std::vector<Inflow>{src("a", 0)});
    FAIL("expected ZeroInflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroInflow);
  }
}

TEST_CASE("mean novelty over winning trades") {
  const NoveltyConfig cfg;
  const auto t = T0() + 30 * kDay;
  const auto m = market("m", T0(), t + 10 * kDay, Outcome::Yes);
  WalletIndex idx;
  auto old = profile(t - 400 * kDay, 20, {});
  old.wallet_id = "old";
  auto fresh = profile(t - kHour, 0, {src("x", 1)});
  fresh.wallet_id = "new";
  idx.emplace("old", old);
  idx.emplace("new", fresh);

  const std::vector none_new{trade(t, 0.5, 10, Side::BuyYes, "old"), trade(t, 0.5, 10, Side::BuyYes, "old")};
  CHECK(*mean_wallet_novelty(m, none_new, idx, cfg).mean == 0.0);

  const std::vector half{trade(t, 0.5, 10, Side::BuyYes, "old"), trade(t, 0.5, 10, Side::BuyYes, "new"),
                         trade(t, 0.5, 10, Side::BuyYes, "ghost")};
  const auto r = mean_wallet_novelty(m, half, idx, cfg);
  CHECK(r.mean == doctest::Approx(0.375));  // fresh wallet scores 0.75 with no late entry
  CHECK(r.scored == 2);
  CHECK(r.missing_profiles == 1);
  CHECK_FALSE(r.per_trade[2]);

  const std::vector ghosts{trade(t, 0.5, 10, Side::BuyYes, "ghost")};
  CHECK_FALSE(mean_wallet_novelty(m, ghosts, idx, cfg).mean);
}

TEST_CASE("novelty is causal in the inflow record") {
  const NoveltyConfig cfg;
  const auto t = T0() + 30 * kDay;
  auto w = profile(t - 400 * kDay, 20, {{"a", 10, t - kDay}});
  const double before = wallet_novelty(w, t, t + kDay * 5, cfg);
  w.inflows.push_back({"b", 10, t + kHour});
  CHECK(wallet_novelty(w, t, t + kDay * 5, cfg) == before);
  CHECK(wallet_novelty(w, t + 2 * kHour, t + kDay * 5, cfg) < before);
}

TEST_CASE("novelty is monotone in funding concentration and bounded") {
  const NoveltyConfig cfg;
  const auto t = T0() + 30 * kDay;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng);
    auto lo = profile(t - 400 * kDay, 20, {src("a", 1.0), src("b", x), src("c", x)});
    auto hi = profile(t - 400 * kDay, 20, {src("a", 1.0), src("b", x / 2), src("c", x / 2)});
    const double a = wallet_novelty(lo, t, t + kDay, cfg);
    const double b = wallet_novelty(hi, t, t + kDay, cfg);
    CHECK(a <= b);
    CHECK(b <= 1.0);
    CHECK(a >= 0.0);
  }
  auto p = profile(t, 0, {});
  CHECK_THROWS_AS(wallet_novelty(p, t - Seconds{1}, t + kDay, cfg), Error);
}

TEST_CASE("weights are normalized unless disabled") {
  NoveltyConfig cfg;
  cfg.alphas = {2, 2, 0, 0};
  const auto t = T0() + 30 * kDay;
  const auto fresh = profile(t - kHour, 0, {});
  CHECK(wallet_novelty(fresh, t, t + kDay, cfg) == 1.0);
  cfg.normalize = false;
  CHECK(wallet_novelty(fresh, t, t + kDay, cfg) == 4.0);
  cfg.alphas = {0, 0, 0, 0};
  cfg.normalize = true;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
