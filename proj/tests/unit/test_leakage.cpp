#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "helpers.hpp"
#include "infoflow/error.hpp"
#include "infoflow/leakage.hpp"
#include "infoflow/pipeline.hpp"

using namespace infoflow;
using namespace testutil;

namespace {

const ScopeConfig kCfg{};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Undefined;
}

}  // namespace

TEST_CASE("ILS from three prices: published examples") {
  const auto barak = ils_from_prices(0.170, 0.629, 1.0, kCfg);
  REQUIRE(barak.ils);
  CHECK(*barak.ils == doctest::Approx(0.459 / 0.830).epsilon(1e-12));
  CHECK(std::abs(*barak.ils - 0.553) <= 0.001);
  CHECK_FALSE(barak.edge_effect);

  const auto aoc = ils_from_prices(0.940, 0.996, 1.0, kCfg);
  CHECK(std::abs(*aoc.ils - 0.933) <= 0.002);
  CHECK(aoc.edge_effect);

  const auto sanders = ils_from_prices(0.910, 0.968, 1.0, kCfg);
  CHECK(std::abs(*sanders.ils - 0.644) <= 0.005);
  CHECK(sanders.edge_effect);
}

TEST_CASE("ILS trivial cases and threshold") {
  const auto flat = ils_from_prices(0.5, 0.5, 1.0, kCfg);
  CHECK(*flat.ils == 0.0);
  const auto trivial = ils_from_prices(0.96, 0.97, 1.0, kCfg);
  CHECK_FALSE(trivial.ils);
  // Boundary of the edge band stays in scope.
  CHECK_FALSE(ils_from_prices(0.9, 0.95, 0.0, kCfg).edge_effect);
  CHECK_FALSE(ils_from_prices(0.1, 0.2, 1.0, kCfg).edge_effect);
  CHECK(ils_from_prices(0.0999, 0.2, 1.0, kCfg).edge_effect);
}

TEST_CASE("ILS regimes follow the trajectory geometry") {
  CHECK(*ils_from_prices(0.3, 1.0, 1.0, kCfg).ils == 1.0);
  CHECK(*ils_from_prices(0.3, 0.0, 0.0, kCfg).ils == 1.0);
  CHECK(*ils_from_prices(0.3, 0.3, 0.0, kCfg).ils == 0.0);
  CHECK(*ils_from_prices(0.3, 0.2, 1.0, kCfg).ils < 0.0);
  double prev = -1e9;
  for (double p = 0.0; p <= 1.0; p += 0.01) {
    const double v = *ils_from_prices(0.4, p, 1.0, kCfg).ils;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("no high ILS escapes the edge flag") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double p0 = u(rng), pn = u(rng);
    const double o = u(rng) < 0.5 ? 1.0 : 0.0;
    const auto r = ils_from_prices(p0, pn, o, kCfg);
    CHECK(r.ils.has_value() == (std::abs(o - p0) >= kCfg.epsilon));
    if (r.ils && *r.ils > 0.9 && (p0 < 0.1 || p0 > 0.9)) CHECK(r.edge_effect);
  }
}

TEST_CASE("compute_ils on a price path") {
  const auto open = T0();
  const auto resolve = open + 10 * kDay;
  auto m = market("m", open, resolve, Outcome::Yes);
  const auto series = build_price_series(std::vector{trade(open, 0.170), trade(open + 2 * kDay, 0.40),
                                                     trade(open + 8 * kDay, 0.629),
                                                     trade(resolve - kHour, 0.99)});
  const auto label = compute_ils(m, series, proxy_anchor(m, 24.0), kCfg);
  REQUIRE(label.ils);
  CHECK(*label.ils == doctest::Approx(0.459 / 0.830).epsilon(1e-12));
  CHECK(label.delta_pre == doctest::Approx(0.459));
  CHECK(label.delta_total == doctest::Approx(0.830));
  CHECK(label.scope_flags.empty());

  const auto near = market("n", open, resolve, Outcome::Yes);
  const auto flat = build_price_series(std::vector{trade(open, 0.97)});
  const auto t = compute_ils(near, flat, proxy_anchor(near, 24.0), kCfg);
  CHECK_FALSE(t.ils);
  CHECK(t.scope_flags.count(ScopeFlag::TrivialResolution));
  CHECK(t.scope_flags.count(ScopeFlag::EdgeEffect));
}

TEST_CASE("compute_ils errors") {
  auto m = market("m", T0(), T0() + kDay, Outcome::Yes);
  const auto series = build_price_series(std::vector{trade(T0(), 0.5)});
  NewsAnchor late{"m", T0() + 2 * kDay, AnchorTier::Article, std::nullopt, 1.0};
  CHECK(code_of([&] { compute_ils(m, series, late, kCfg); }) == ErrorCode::AnchorOutOfRange);
  NewsAnchor early{"m", T0() - kHour, AnchorTier::Article, std::nullopt, 1.0};
  CHECK(code_of([&] { compute_ils(m, series, early, kCfg); }) == ErrorCode::AnchorOutOfRange);
  m.resolution_type = ResolutionType::Unclassifiable;
  CHECK(code_of([&] { compute_ils(m, series, proxy_anchor(m, 6.0), kCfg); }) ==
        ErrorCode::WrongResolutionType);
}

TEST_CASE("multi-window ILS: constant price, linear drift oracle, omissions") {
  const auto open = T0();
  const auto resolve = open + 4 * kDay;
  const auto m = market("m", open, resolve, Outcome::Yes);
  const auto t_news = open + 3 * kDay;
  NewsAnchor a{"m", t_news, AnchorTier::Article, std::nullopt, 1.0};

  // Linear drift from 0.2 at t_news - 24h to 0.8 at t_news + 24h, one trade per minute.
  const double p_a = 0.2, p_b = 0.8;
  const auto start = t_news - 24 * kHour;
  std::vector<Trade> trades{trade(open, p_a)};
  for (int k = 0; k <= 48 * 60; ++k) {
    trades.push_back(trade(start + k * kMinute, p_a + (p_b - p_a) * k / (48.0 * 60.0)));
  }
  const auto series = build_price_series(trades);
  const std::vector<Seconds> windows{30 * kMinute, 2 * kHour, 6 * kHour, 24 * kHour, 7 * kDay};
  const auto set = compute_ils_windows(m, series, a, kCfg, windows);
  REQUIRE(set.windows.size() == 4);
  REQUIRE(set.omitted.size() == 1);
  CHECK(set.omitted[0] == 7 * kDay);
  const double p_news = p_a + (p_b - p_a) * 0.5;
  for (const auto& w : set.windows) {
    const double frac = w.window.count() / (48.0 * 3600.0);
    const double p_start = p_news - (p_b - p_a) * frac;
    REQUIRE(w.ils);
    CHECK(*w.ils == doctest::Approx((p_news - p_start) / (1.0 - p_start)).epsilon(1e-9));
  }

  const auto constant = build_price_series(std::vector{trade(open, 0.4)});
  for (const auto& w : compute_ils_windows(m, constant, a, kCfg, windows).windows) {
    REQUIRE(w.ils);
    CHECK(*w.ils == 0.0);
  }

  const auto near = build_price_series(std::vector{trade(open, 0.4), trade(t_news - 3 * kHour, 0.98)});
  const auto nearset = compute_ils_windows(m, near, a, kCfg, windows);
  CHECK_FALSE(nearset.windows[0].ils);  // 30min window starts at 0.98
  CHECK(nearset.windows[0].edge_effect);
}

TEST_CASE("anchor sensitivity") {
  const auto open = T0();
  const auto resolve = open + 10 * kDay;
  const auto m = market("m", open, resolve, Outcome::Yes);
  const auto series = build_price_series(std::vector{trade(open, 0.170), trade(open + 5 * kDay, 0.643),
                                                     trade(resolve - 30 * kHour, 0.629),
                                                     trade(resolve - 12 * kHour, 0.05)});
  NewsAnchor article{"m", open + 6 * kDay, AnchorTier::Article, std::nullopt, 0.9};
  const std::vector robust_set{proxy_anchor(m, 24.0), article};
  const auto r = anchor_sensitivity(m, series, robust_set, kCfg);
  CHECK(r.robust);
  REQUIRE(r.per_anchor_ils.size() == 2);
  CHECK(r.max_abs_difference == doctest::Approx((0.643 - 0.629) / 0.83).epsilon(1e-9));

  const std::vector unstable{proxy_anchor(m, 24.0), proxy_anchor(m, 6.0)};
  const auto u = anchor_sensitivity(m, series, unstable, kCfg);
  CHECK_FALSE(u.robust);
  CHECK(*u.per_anchor_ils[1] < 0.0);

  const std::vector same{article, article};
  CHECK(anchor_sensitivity(m, series, same, kCfg).robust);
  CHECK(anchor_sensitivity(m, series, same, kCfg).max_abs_difference == 0.0);

  const std::vector one{article};
  CHECK(code_of([&] { anchor_sensitivity(m, series, one, kCfg); }) == ErrorCode::InsufficientAnchors);
}

TEST_CASE("pre-news volume share") {
  const auto t_news = T0() + kDay;
  const auto t_res = T0() + 2 * kDay;
  const std::vector before{trade(T0(), 0.5, 10), trade(T0() + kHour, 0.6, 5)};
  CHECK(pre_news_volume_share(before, t_news, t_res) == 1.0);
  const std::vector after{trade(t_news, 0.5, 10), trade(t_news + kHour, 0.6, 5)};
  CHECK(pre_news_volume_share(after, t_news, t_res) == 0.0);
  CHECK_THROWS_AS(pre_news_volume_share(std::vector<Trade>{}, t_news, t_res), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Trade> trades;
  long double pre = 0, total = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto ts = T0() + Seconds{static_cast<int>(u(rng) * 3 * 86400)};
    const auto t = trade(ts, u(rng), 1 + 50 * u(rng));
    if (ts <= t_res) total += t.price * t.size;
    if (ts < t_news) pre += t.price * t.size;
    trades.push_back(t);
  }
  std::sort(trades.begin(), trades.end(), [](const Trade& a, const Trade& b) { return a.ts < b.ts; });
  CHECK(std::abs(pre_news_volume_share(trades, t_news, t_res) - static_cast<double>(pre / total)) <= 1e-12);
}

TEST_CASE("max pre-news jump") {
  const auto s = build_price_series(
      std::vector{trade(T0(), 0.2), trade(T0() + kMinute, 0.8), trade(T0() + 2 * kMinute, 0.6),
                  trade(T0() + kDay, 0.0)});
  CHECK(*max_pre_news_jump(s, T0(), T0() + kHour) == doctest::Approx(0.6));
  const auto flat = build_price_series(std::vector{trade(T0(), 0.4), trade(T0() + kMinute, 0.4)});
  CHECK(*max_pre_news_jump(flat, T0(), T0() + kHour) == 0.0);
  CHECK_FALSE(max_pre_news_jump(flat, T0(), T0() + Seconds{30}));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Trade> trades;
  for (int i = 0; i < 500; ++i) trades.push_back(trade(T0() + i * kMinute, u(rng)));
  const auto rs = build_price_series(trades);
  const auto t_news = T0() + 300 * kMinute;
  double oracle = 0.0;
  for (int i = 1; i <= 300; ++i) oracle = std::max(oracle, std::abs(trades[i].price - trades[i - 1].price));
  CHECK(std::abs(*max_pre_news_jump(rs, T0(), t_news) - oracle) <= 1e-12);
}

TEST_CASE("winning-trade concentration and timing") {
  CHECK(wallet_concentration_hhi(std::vector{trade(T0(), 0.5, 7)}) == 1.0);
  std::vector<Trade> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(trade(T0(), 0.5, 3));
  CHECK(wallet_concentration_hhi(ten) == doctest::Approx(0.10).epsilon(1e-12));
  const std::vector three{trade(T0(), 0.5, 5), trade(T0(), 0.5, 3), trade(T0(), 0.5, 2)};
  CHECK(wallet_concentration_hhi(three) == doctest::Approx(0.38).epsilon(1e-12));
  CHECK_THROWS_AS(wallet_concentration_hhi(std::vector<Trade>{}), Error);

  const auto t_news = T0() + kDay;
  const std::vector timed{trade(t_news, 0.5), trade(t_news - 2 * kHour, 0.5), trade(t_news + kHour, 0.5)};
  const auto gaps = time_to_news_gaps(timed, t_news);
  REQUIRE(gaps.pre_news.size() == 2);
  CHECK(gaps.pre_news[0] == Seconds{0});
  CHECK(gaps.pre_news[1] == 2 * kHour);
  REQUIRE(gaps.post_news.size() == 1);
  CHECK(gaps.post_news[0] == -kHour);

  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> lead(5 * 60, 10 * 60);
  std::vector<Trade> cluster;
  for (int i = 0; i < 10; ++i) cluster.push_back(trade(t_news - Seconds{lead(rng)}, 0.5));
  for (const auto g : time_to_news_gaps(cluster, t_news).pre_news) {
    CHECK(g >= 5 * kMinute);
    CHECK(g <= 10 * kMinute);
  }
}

TEST_CASE("pilot replication property on a constructed population") {
  // 125 markets: 62 scores below -0.084, one at it, 43 in (-0.084, 0) and 19
  // positive, pushed through random opening prices and outcomes.
  std::vector<double> targets;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 62; ++i) targets.push_back(-0.1 - 0.5 * u(rng));
  targets.push_back(-0.084);
  for (int i = 0; i < 43; ++i) targets.push_back(-0.08 + 0.07 * u(rng));
  for (int i = 0; i < 19; ++i) targets.push_back(0.05 + 0.5 * u(rng));
  std::shuffle(targets.begin(), targets.end(), rng);
  std::vector<double> ils;
  for (double target : targets) {
    const double p0 = 0.3 + 0.4 * u(rng);
    const double o = u(rng) < 0.5 ? 1.0 : 0.0;
    const auto r = ils_from_prices(p0, p0 + target * (o - p0), o, kCfg);
    REQUIRE(r.ils);
    ils.push_back(*r.ils);
  }
  const auto q = summarize(ils);
  CHECK(q.n == 125);
  CHECK(q.positive == 19);
  CHECK(q.median == doctest::Approx(-0.084).epsilon(1e-9));
  CHECK(static_cast<double>(q.positive) / static_cast<double>(q.n) == doctest::Approx(0.152));
}
