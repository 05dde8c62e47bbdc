#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "infoflow/hawkes.hpp"
#include "infoflow/market.hpp"
#include "infoflow/microstructure.hpp"
#include "infoflow/scoring.hpp"
#include "infoflow/synth.hpp"

using namespace infoflow;

namespace {

std::vector<Trade> flow(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Trade> out(n);
  auto ts = from_unix(1735689600);
  for (auto& t : out) {
    ts += Seconds{1 + static_cast<int>(u(rng) * 30)};
    t.ts = ts;
    t.market_id = "m";
    t.wallet_id = "w";
    t.side = u(rng) < 0.5 ? Side::BuyYes : Side::SellYes;
    t.price = 0.2 + 0.6 * u(rng);
    t.size = 1.0 + 100.0 * u(rng);
  }
  return out;
}

void BM_PriceSeries(benchmark::State& state) {
  const auto trades = flow(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_price_series(trades));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PriceSeries)->Arg(1 << 12)->Arg(1 << 16);

void BM_Vpin(benchmark::State& state) {
  const auto trades = flow(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vpin(trades, 500.0, 50));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Vpin)->Arg(1 << 12)->Arg(1 << 16);

void BM_HawkesFit(benchmark::State& state) {
  const auto t = gen_hawkes_arrivals(1.0, 1.0, 2.0, static_cast<double>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(fit_hawkes(t, static_cast<double>(state.range(0))));
  state.counters["arrivals"] = static_cast<double>(t.size());
}
BENCHMARK(BM_HawkesFit)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Murphy(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ForecastPair> pairs(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pairs) {
    p.forecast = u(rng);
    p.outcome = u(rng) < p.forecast;
  }
  for (auto _ : state) benchmark::DoNotOptimize(murphy_decompose(pairs, 10, true));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Murphy)->Arg(1 << 10)->Arg(1 << 16);

}  // namespace
BENCHMARK_MAIN();
