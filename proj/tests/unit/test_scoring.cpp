#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "helpers.hpp"
#include "infoflow/error.hpp"
#include "infoflow/normal.hpp"
#include "infoflow/scoring.hpp"

using namespace infoflow;
using namespace testutil;

namespace {

// Decomposition from explicit per-bin groups in long double.
struct Oracle {
  long double brier = 0, unc = 0, rel = 0, res = 0;
};

Oracle murphy_oracle(const std::vector<ForecastPair>& pairs, std::size_t bins) {
  std::map<std::size_t, std::vector<ForecastPair>> groups;
  long double obar = 0;
  for (const auto& p : pairs) {
    auto b = static_cast<std::size_t>(p.forecast * bins);
    if (b == bins) b = bins - 1;
    groups[b].push_back(p);
    obar += p.outcome;
  }
  const long double n = pairs.size();
  obar /= n;
  Oracle o;
  o.unc = obar * (1 - obar);
  for (const auto& [b, g] : groups) {
    long double f = 0, y = 0;
    for (const auto& p : g) {
      f += p.forecast;
      y += p.outcome;
    }
    f /= g.size();
    y /= g.size();
    const long double w = g.size() / n;
    o.rel += w * (f - y) * (f - y);
    o.res += w * (y - obar) * (y - obar);
    for (const auto& p : g) o.brier += (f - p.outcome) * (f - p.outcome) / n;
  }
  return o;
}

std::vector<ForecastPair> random_population(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ForecastPair> out(n);
  for (auto& p : out) {
    p.forecast = u(rng);
    p.outcome = u(rng) < p.forecast ? 1 : 0;
  }
  return out;
}

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

TEST_CASE("Murphy decomposition agrees with a group-by oracle") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 50; ++k) {
    const auto pop = random_population(rng, 200 + k);
    const auto m = murphy_decompose(pop, 10);
    const auto o = murphy_oracle(pop, 10);
    CHECK(std::abs(m.brier - static_cast<double>(o.brier)) <= 1e-12);
    CHECK(std::abs(m.unc - static_cast<double>(o.unc)) <= 1e-12);
    CHECK(std::abs(m.rel - static_cast<double>(o.rel)) <= 1e-12);
    CHECK(std::abs(m.res - static_cast<double>(o.res)) <= 1e-12);
    CHECK(std::abs(m.brier - (m.unc + m.rel - m.res)) <= 1e-12);
  }
}

TEST_CASE("no-skill and perfect forecasters") {
  std::vector<ForecastPair> clim;
  for (int i = 0; i < 100; ++i) clim.push_back({0.3, i < 30 ? 1 : 0});
  const auto c = murphy_decompose(clim);
  CHECK(c.res == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.rel == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.brier == doctest::Approx(0.21));

  std::vector<ForecastPair> perfect;
  for (int i = 0; i < 97; ++i) perfect.push_back({i % 3 ? 1.0 : 0.0, i % 3 ? 1 : 0});
  const auto p = murphy_decompose(perfect);
  CHECK(p.res == p.unc);
  CHECK(p.brier == 0.0);
  CHECK(p.rel == 0.0);
}

TEST_CASE("raw-forecast variant") {
  std::mt19937_64 rng(42);
  const auto pop = random_population(rng, 500);
  const auto m = murphy_decompose(pop, 10, true);
  REQUIRE(m.brier_raw);
  double raw = 0;
  for (const auto& p : pop) raw += (p.forecast - p.outcome) * (p.forecast - p.outcome);
  CHECK(*m.brier_raw == doctest::Approx(raw / 500).epsilon(1e-12));
  CHECK(std::abs(*m.brier_raw - (m.brier + *m.within_bin_variance - 2 * *m.within_bin_covariance)) <= 1e-12);
  CHECK_FALSE(murphy_decompose(pop, 10).brier_raw);
}

TEST_CASE("bins and input validation") {
  CHECK(forecast_bin(1.0, 10) == 9);
  CHECK(forecast_bin(0.0, 10) == 0);
  CHECK(forecast_bin(0.1, 10) == 1);
  CHECK(code_of([] { murphy_decompose(std::vector<ForecastPair>{}); }) == ErrorCode::NoData);
  CHECK(code_of([] { murphy_decompose(std::vector<ForecastPair>{{1.5, 1}}); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { murphy_decompose(std::vector<ForecastPair>{{0.5, 2}}); }) == ErrorCode::ConfigError);
}

TEST_CASE("resolution share") {
  // Prices at news already equal the outcome: all resolution is priced in.
  std::vector<NewsObservation> full;
  for (int i = 0; i < 40; ++i) full.push_back({0.5, static_cast<double>(i % 2), i % 2});
  const auto a = resolution_share(full);
  CHECK(a.share == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*a.mean_ils == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*a.gap == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<NewsObservation> none;
  for (int i = 0; i < 40; ++i) none.push_back({0.5, 0.5, i % 2});
  const auto b = resolution_share(none);
  CHECK(b.share == doctest::Approx(0.0));
  CHECK(*b.mean_ils == doctest::Approx(0.0));

  std::vector<NewsObservation> same(10, {0.5, 0.7, 1});
  CHECK(code_of([&] { resolution_share(same); }) == ErrorCode::Undefined);
  CHECK(code_of([&] { resolution_share(std::span(same).first(1)); }) == ErrorCode::NoData);
}

TEST_CASE("label aggregation") {
  LeakageLabel l;
  l.market_id = "m";
  l.ils = 0.7;
  l.v_pre = 0.6;
  l.mean_wallet_novelty = 0.55;
  l.ils_windows.windows = {{30 * kMinute, 0.2, 0.5, false}, {2 * kHour, std::nullopt, 0.5, false}};
  auto v = aggregate_label(l);
  CHECK(*v.y_bin);
  CHECK(*v.ils_30min == 0.2);
  CHECK_FALSE(v.ils_2h);
  CHECK_FALSE(v.partial);

  CHECK_FALSE(*aggregate_label(l, {0.8, 0.5, 0.5}).y_bin);
  l.v_pre = 0.5;
  CHECK(*aggregate_label(l).y_bin);  // thresholds are inclusive

  l.mean_wallet_novelty.reset();
  v = aggregate_label(l);
  CHECK_FALSE(v.y_bin);
  CHECK(v.partial);
  CHECK(*v.ils == 0.7);
}

TEST_CASE("feature assembly") {
  auto m = market("m", T0(), T0() + 10 * kDay, Outcome::Yes);
  m.category = Category::Corporate;
  m.total_volume_usdc = 250000.0;
  const MicroFeatures micro;
  const auto t = m.resolve_ts - 3 * kHour;
  const auto fv = assemble_features(micro, 0.4, m, t);
  CHECK(fv.c_liq == 5);
  CHECK(fv.c_ttr == doctest::Approx(std::log(4.0)));
  CHECK(fv.c_cat == category_code(Category::Corporate));
  CHECK(*fv.mean_wn == 0.4);
  CHECK(assemble_features(micro, std::nullopt, m, t, 999.0).c_liq == 2);
  CHECK(liquidity_tier(0.5) == 0);
  CHECK(code_of([&] { assemble_features(micro, std::nullopt, m, m.resolve_ts); }) == ErrorCode::MarketClosed);
}

TEST_CASE("required positives") {
  CHECK(required_positives(0.7, 0.2).n == 6);
  CHECK(required_positives(0.7, 0.2, 0.05, 0.8, {true, false}).n == 7);
  CHECK(required_positives(0.7, 0.2, 0.05, 0.8, {false, true}).n == 10);
  CHECK(required_positives(0.7, 0.2, 0.05, 0.8, {true, true}).n == 12);

  // Oracle: quantiles by bisection on erfc in long double.
  auto q = [](long double p) {
    long double lo = -10, hi = 10;
    for (int i = 0; i < 200; ++i) {
      const long double mid = (lo + hi) / 2;
      (0.5L * std::erfc(-mid / std::sqrt(2.0L)) < p ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
  };
  for (auto [pi1, pi0] : {std::pair{0.7, 0.2}, {0.6, 0.5}, {0.9, 0.1}, {0.35, 0.3}}) {
    const long double z = q(0.95L) + q(0.80L);
    const long double n = z * z * pi1 * (1 - pi1) / ((pi1 - pi0) * (pi1 - pi0));
    const auto r = required_positives(pi1, pi0);
    CHECK(r.n_exact == doctest::Approx(static_cast<double>(n)).epsilon(1e-9));
    CHECK(r.n == static_cast<std::size_t>(std::ceil(n)));
  }

  // Smaller effects need more positives.
  std::size_t prev = 0;
  for (double pi0 = 0.6; pi0 >= 0.05; pi0 -= 0.05) {
    const auto n = required_positives(0.7, pi0).n;
    if (prev) CHECK(n <= prev);
    prev = n;
  }
  CHECK(code_of([] { required_positives(0.2, 0.7); }) == ErrorCode::InvalidEffect);
  CHECK(code_of([] { required_positives(0.5, 0.5); }) == ErrorCode::InvalidEffect);
  CHECK(code_of([] { required_positives(1.0, 0.5); }) == ErrorCode::InvalidEffect);
}

TEST_CASE("normal quantile accuracy") {
  for (double p : {1e-10, 1e-5, 0.01, 0.025, 0.2, 0.5, 0.8, 0.95, 0.975, 0.999999}) {
    CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) <= 1e-12 + 1e-9 * p);
  }
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK_THROWS_AS(normal_quantile(0.0), Error);
}
