#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "infoflow/market.hpp"
#include "infoflow/time.hpp"

namespace testutil {

using namespace infoflow;

inline Timestamp T0() { return parse_iso8601("2025-03-01T00:00:00Z"); }

inline Trade trade(Timestamp ts, double price, double size = 10.0, Side side = Side::BuyYes,
                   std::string wallet = "w0", std::string market = "m") {
  Trade t;
  t.ts = ts;
  t.market_id = std::move(market);
  t.wallet_id = std::move(wallet);
  t.side = side;
  t.price = price;
  t.size = size;
  return t;
}

inline MarketRecord market(std::string id, Timestamp open, Timestamp resolve, Outcome o,
                           ResolutionType type = ResolutionType::EventResolved) {
  MarketRecord m;
  m.market_id = std::move(id);
  m.question = "Will it happen?";
  m.open_ts = open;
  m.resolve_ts = resolve;
  m.outcome = o;
  m.total_volume_usdc = 100000.0;
  m.resolution_type = type;
  return m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("infoflow_unit_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testutil
