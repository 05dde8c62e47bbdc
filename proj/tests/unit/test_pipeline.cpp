#include <doctest.h>

#include "helpers.hpp"
#include "infoflow/error.hpp"
#include "infoflow/pipeline.hpp"
#include "infoflow/synth.hpp"

using namespace infoflow;
using namespace testutil;

namespace {

PipelineInputs from_bundle(const SynthBundle& b) {
  PipelineInputs in;
  in.markets = b.markets;
  in.trades = b.trades;
  in.wallets = b.wallets;
  in.anchors = b.anchors;
  in.has_wallets = true;
  return in;
}

PipelineInputs barak() {
  const auto open = parse_iso8601("2025-12-10T00:00:00Z");
  const auto resolve = parse_iso8601("2025-12-23T12:08:00Z");
  auto m = market("barak", open, resolve, Outcome::Yes);
  m.question = "Will Ehud Barak be named in the Epstein files?";
  m.has_resolution_type = false;
  m.has_category = false;
  PipelineInputs in;
  in.markets = {m};
  in.trades = {trade(open, 0.170, 100, Side::BuyYes, "w1", "barak"),
               trade(resolve - 30 * kHour, 0.629, 100, Side::BuyYes, "w2", "barak"),
               trade(resolve - kHour, 0.99, 100, Side::BuyYes, "w3", "barak")};
  return in;
}

}  // namespace

TEST_CASE("event market scored through the resolution proxy") {
  const PipelineConfig cfg;
  const auto r = run_pipeline(barak(), cfg, RuleSet::defaults());
  REQUIRE(r.rows.size() == 1);
  const auto& row = r.rows[0];
  CHECK(row["status"] == "scored");
  CHECK(row["kind"] == "event");
  CHECK(row["resolution_type"] == "event_resolved");
  CHECK(row["ils"].get<double>() == doctest::Approx((0.629 - 0.170) / (1 - 0.170)).epsilon(1e-12));
  CHECK(std::abs(row["ils"].get<double>() - 0.553) <= 0.001);
  CHECK(row["anchor"]["tier"] == "proxy_offset");
  CHECK(row["wallet_profiles_missing"].is_null());
  CHECK(r.summary.scored == 1);
  CHECK(r.summary.ils.n == 1);
}

TEST_CASE("empty manifest succeeds with a warning") {
  const PipelineConfig cfg;
  const auto r = run_pipeline(PipelineInputs{}, cfg, RuleSet::defaults());
  CHECK(r.rows.empty());
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.summary.ils.n == 0);
}

TEST_CASE("volume filter and unclassifiable markets") {
  auto in = barak();
  auto small = in.markets[0];
  small.market_id = "small";
  small.total_volume_usdc = 10.0;
  auto sport = in.markets[0];
  sport.market_id = "sport";
  sport.question = "Lakers vs. Celtics";
  in.markets.push_back(small);
  in.markets.push_back(sport);
  const auto r = run_pipeline(in, PipelineConfig{}, RuleSet::defaults());
  CHECK(r.summary.below_volume == 1);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[1]["status"] == "excluded");
  CHECK(r.summary.excluded == 1);
}

TEST_CASE("failures are fatal unless skipped") {
  auto in = barak();
  auto empty = in.markets[0];
  empty.market_id = "no-trades";
  in.markets.push_back(empty);
  CHECK_THROWS_AS(run_pipeline(in, PipelineConfig{}, RuleSet::defaults()), Error);
  const auto r = run_pipeline(in, PipelineConfig{}, RuleSet::defaults(), {1, true});
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0]["status"] == "scored");
  CHECK(r.rows[1]["status"] == "error");
  CHECK(r.rows[1]["error"]["stage"].is_string());
  CHECK(r.summary.errors == 1);
}

TEST_CASE("parallel runs match the serial run and keep manifest order") {
  ScenarioSpec spec;
  spec.seed = 21;
  spec.n_markets = 40;
  spec.regime = Regime::EventLeak;
  spec.leak_fraction = 0.5;
  const auto in = from_bundle(gen_population(spec));
  const auto a = run_pipeline(in, PipelineConfig{}, RuleSet::defaults(), {1, true});
  const auto b = run_pipeline(in, PipelineConfig{}, RuleSet::defaults(), {3, true});
  REQUIRE(a.rows.size() == b.rows.size());
  REQUIRE(a.rows.size() == in.markets.size() - a.summary.below_volume);
  std::size_t next = 0;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i] == b.rows[i]);
    while (next < in.markets.size() && in.markets[next].market_id != a.rows[i]["market_id"]) ++next;
    CHECK(next < in.markets.size());  // manifest order preserved
  }
  CHECK(to_json(a.summary) == to_json(b.summary));
}

TEST_CASE("null population centres on zero") {
  ScenarioSpec spec;
  spec.seed = 22;
  spec.n_markets = 150;
  spec.regime = Regime::Null;
  const auto r = run_pipeline(from_bundle(gen_population(spec)), PipelineConfig{}, RuleSet::defaults(), {1, true});
  REQUIRE(r.summary.ils.n > 50);
  CHECK(std::abs(r.summary.ils.median) <= 0.1);
}

TEST_CASE("deadline markets produce deadline rows") {
  ScenarioSpec spec;
  spec.seed = 23;
  spec.n_markets = 30;
  spec.regime = Regime::DeadlineLeak;
  spec.leak_fraction = 0.5;
  const auto r = run_pipeline(from_bundle(gen_population(spec)), PipelineConfig{}, RuleSet::defaults(), {1, true});
  std::size_t deadline = 0, structural = 0;
  for (const auto& row : r.rows) {
    if (row.value("kind", "") != "deadline") continue;
    ++deadline;
    if (row["ils_dl_kind"] == "structural_zero") {
      ++structural;
      CHECK(row["outcome"] == "NO");
    }
  }
  CHECK(deadline == r.rows.size() - r.summary.errors);
  CHECK(deadline > 0);
  CHECK(structural == r.summary.structural_zero);
}

TEST_CASE("report files and manifest hash") {
  const auto dir = scratch("pipeline_report");
  PipelineConfig cfg;
  cfg.output_dir = dir / "out";
  cfg.paths.markets = dir / "markets.jsonl";
  cfg.paths.trades = dir / "trades.jsonl";
  const auto in = barak();
  std::vector<json> ms, ts;
  for (const auto& m : in.markets) ms.push_back(to_json(m));
  for (const auto& t : in.trades) ts.push_back(to_json(t));
  write_text(cfg.paths.markets, [&] {
    std::ostringstream o;
    write_jsonl(o, ms);
    return o.str();
  }());
  write_text(cfg.paths.trades, [&] {
    std::ostringstream o;
    write_jsonl(o, ts);
    return o.str();
  }());
  run_pipeline(cfg);
  const auto first = json::parse(read_text(cfg.output_dir / "run_manifest.json"));
  const auto labels = read_text(cfg.output_dir / "labels.jsonl");
  run_pipeline(cfg);
  const auto second = json::parse(read_text(cfg.output_dir / "run_manifest.json"));
  CHECK(first["manifest_hash"] == second["manifest_hash"]);
  CHECK(labels == read_text(cfg.output_dir / "labels.jsonl"));
  CHECK(first["outputs"]["labels.jsonl"] == fnv1a_hex(labels));
  CHECK(std::filesystem::exists(cfg.output_dir / "summary.txt"));
}

TEST_CASE("quantile summary") {
  const auto q = summarize({0.0, 1.0, 2.0, 3.0, -1.0});
  CHECK(q.n == 5);
  CHECK(q.median == 1.0);
  CHECK(q.q25 == 0.0);
  CHECK(q.min == -1.0);
  CHECK(q.max == 3.0);
  CHECK(q.mean == 1.0);
  CHECK(q.positive == 3);
  CHECK(summarize({}).n == 0);
}
