#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "infoflow/config.hpp"
#include "infoflow/error.hpp"
#include "infoflow/io.hpp"
#include "infoflow/pipeline.hpp"

using namespace infoflow;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p);
  for (const auto& l : lines) out << l << '\n';
}

}  // namespace

TEST_CASE("market, trade, anchor and wallet records round trip") {
  auto m = market("m1", T0(), T0() + 3 * kDay, Outcome::No, ResolutionType::DeadlineResolved);
  m.deadline_ts = T0() + 2 * kDay;
  m.category = Category::Regulatory;
  const auto m2 = market_from_json(to_json(m));
  CHECK(m2.market_id == m.market_id);
  CHECK(m2.deadline_ts == m.deadline_ts);
  CHECK(m2.category == Category::Regulatory);
  CHECK(m2.resolution_type == ResolutionType::DeadlineResolved);
  CHECK(m2.outcome == Outcome::No);

  const auto t = trade(T0() + Seconds{7}, 0.25, 3.5, Side::SellYes, "0xabc", "m1");
  const auto t2 = trade_from_json(to_json(t));
  CHECK(t2.ts == t.ts);
  CHECK(t2.side == Side::SellYes);
  CHECK(t2.price == 0.25);
  CHECK(t2.size == 3.5);

  NewsAnchor a{"m1", T0() + kDay, AnchorTier::ProxyOffset, 48.0, 0.5};
  const auto a2 = anchor_from_json(to_json(a));
  CHECK(a2.tier == AnchorTier::ProxyOffset);
  CHECK(a2.proxy_offset_hours == 48.0);

  WalletProfile w;
  w.wallet_id = "0xabc";
  w.first_tx_ts = T0() - kDay;
  w.market_first_trade_ts = {T0() - kHour, T0() - 2 * kHour};
  w.inflows = {{"cex", 10.0, std::nullopt}, {"bridge", 5.0, T0()}};
  const auto w2 = wallet_from_json(to_json(w));
  CHECK(w2.inflows.size() == 2);
  CHECK(w2.inflows[1].ts == T0());
  CHECK(w2.market_first_trade_ts.size() == 2);
}

TEST_CASE("timestamps accept unix seconds") {
  const auto j = nlohmann::json::parse(
      R"({"ts": 1740787200, "market_id": "m", "wallet_id": "w", "side": "BUY_YES", "price": 0.5, "size": 1})");
  CHECK(trade_from_json(j).ts == parse_iso8601("2025-03-01T00:00:00Z"));
}

TEST_CASE("readers report line numbers") {
  const auto dir = scratch("readers");
  write_lines(dir / "trades.jsonl",
              {R"({"ts":"2025-03-01T00:00:00Z","market_id":"m","wallet_id":"w","side":"BUY_YES","price":0.5,"size":1})",
               "",
               R"({"ts":"2025-03-01T00:01:00Z","market_id":"m","wallet_id":"w","side":"BUY_YES","price":1.2,"size":1})",
               "{not json"});
  try {
    read_trades(dir / "trades.jsonl");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  std::vector<InputIssue> issues;
  const auto ok = read_trades(dir / "trades.jsonl", &issues);
  CHECK(ok.size() == 1);
  REQUIRE(issues.size() == 2);
  CHECK(issues[0].line == 3);
  CHECK(issues[1].line == 4);
}

TEST_CASE("csv trade logs are accepted") {
  const auto dir = scratch("csv");
  write_lines(dir / "trades.csv", {"ts,market_id,wallet_id,side,price,size",
                                    "2025-03-01T00:00:00Z,m,w1,BUY_YES,0.4,10",
                                    "2025-03-01T00:00:30Z,m,w2,SELL_YES,0.6,5"});
  const auto trades = read_trades(dir / "trades.csv");
  REQUIRE(trades.size() == 2);
  CHECK(trades[1].side == Side::SellYes);
  CHECK(trades[1].size == 5.0);
}

TEST_CASE("missing file is reported") {
  try {
    read_markets("/nonexistent/markets.jsonl");
    FAIL("expected MissingFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingFile);
  }
}

TEST_CASE("config load -> save -> load is the identity") {
  const auto dir = scratch("config");
  PipelineConfig c;
  c.paths = {"a/markets.jsonl", "a/trades.jsonl", fs::path("a/wallets.jsonl"), std::nullopt};
  c.output_dir = "results";
  c.scope.epsilon = 0.04;
  c.scope.proxy_offsets_hours = {24.0, 12.0, 6.0};
  c.windows.vr_k = 4;
  c.windows.vpin_bucket_by_category[Category::Regulatory] = 1234.5;
  c.windows.oi_windows = {kMinute, 10 * kMinute};
  c.novelty.alphas = {0.4, 0.3, 0.2, 0.1};
  c.thresholds = {0.6, 0.4, 0.3};
  c.ils_windows = {2 * kHour, kDay};
  c.top_k = 7;
  save_config(c, dir / "c.json");
  const auto c2 = load_config(dir / "c.json");
  save_config(c2, dir / "c2.json");
  CHECK(read_text(dir / "c.json") == read_text(dir / "c2.json"));
  CHECK(to_json(c) == to_json(c2));
  CHECK(c2.windows.vpin_bucket_by_category.at(Category::Regulatory) == 1234.5);
  CHECK(c2.ils_windows == c.ils_windows);
  CHECK_FALSE(c2.paths.anchors);

  auto c3 = c2;
  c3.output_dir = "elsewhere";
  CHECK(config_hash(c2) == config_hash(c3));
  c3.scope.epsilon = 0.05;
  CHECK(config_hash(c2) != config_hash(c3));
}

TEST_CASE("config rejects bad values") {
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"scope": {"epsilon": -1}})")), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"scope": {"edge_band": 0.5}})")), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"windows": {"vr_k": 0}})")), Error);
  const auto defaults = config_from_json(nlohmann::json::object());
  CHECK(defaults.scope.epsilon == 0.05);
  CHECK(defaults.windows.vr_k == 6);
}

TEST_CASE("environment overrides paths only") {
  PipelineConfig c;
  ::setenv("IFLOW_MARKETS", "/env/markets.jsonl", 1);
  ::setenv("IFLOW_OUT_DIR", "/env/out", 1);
  apply_env_overrides(c);
  ::unsetenv("IFLOW_MARKETS");
  ::unsetenv("IFLOW_OUT_DIR");
  CHECK(c.paths.markets == "/env/markets.jsonl");
  CHECK(c.output_dir == "/env/out");
  CHECK(c.scope.epsilon == 0.05);
}

TEST_CASE("validate_inputs: referential and range errors") {
  const auto dir = scratch("validate");
  write_lines(dir / "markets.jsonl",
              {R"({"market_id":"m","question":"Will it?","open_ts":"2025-03-01T00:00:00Z","resolve_ts":"2025-03-05T00:00:00Z","outcome":"YES","total_volume_usdc":60000})"});
  write_lines(dir / "trades.jsonl",
              {R"({"ts":"2025-03-01T00:00:00Z","market_id":"m","wallet_id":"w","side":"BUY_YES","price":0.5,"size":1})",
               R"({"ts":"2025-03-01T00:01:00Z","market_id":"ghost","wallet_id":"w","side":"BUY_YES","price":0.5,"size":1})",
               R"({"ts":"2025-03-01T00:02:00Z","market_id":"m","wallet_id":"w","side":"BUY_YES","price":1.2,"size":1})"});
  const auto r = validate_inputs({dir / "markets.jsonl", dir / "trades.jsonl", std::nullopt, std::nullopt});
  CHECK_FALSE(r.ok());
  bool referential = false, range = false;
  for (const auto& i : r.issues) {
    if (i.line == 2 && i.message.find("ghost") != std::string::npos) referential = true;
    if (i.line == 3) range = true;
  }
  CHECK(referential);
  CHECK(range);

  write_lines(dir / "trades_ok.jsonl",
              {R"({"ts":"2025-03-01T00:00:00Z","market_id":"m","wallet_id":"w","side":"BUY_YES","price":0.5,"size":1})"});
  const auto good = validate_inputs({dir / "markets.jsonl", dir / "trades_ok.jsonl", std::nullopt, std::nullopt});
  CHECK(good.ok());
  CHECK(good.markets == 1);
  CHECK(good.trades == 1);

  const auto missing = validate_inputs({dir / "nope.jsonl", dir / "trades_ok.jsonl", std::nullopt, std::nullopt});
  REQUIRE_FALSE(missing.ok());
  CHECK(missing.issues[0].line == 0);
  CHECK(missing.issues.size() == 1);  // no cascade of unknown-market references
}

TEST_CASE("jsonl writer is stable") {
  std::ostringstream a, b;
  std::vector<nlohmann::json> rows{{{"b", 1}, {"a", 0.1}}, {{"x", nullptr}}};
  write_jsonl(a, rows);
  write_jsonl(b, rows);
  CHECK(a.str() == b.str());
  CHECK(a.str() == "{\"a\":0.1,\"b\":1}\n{\"x\":null}\n");
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}
