#include "infoflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "infoflow/error.hpp"

namespace infoflow {

namespace fs = std::filesystem;

namespace {

Timestamp ts_from_json(const json& j, const char* field) {
  const auto& v = j.at(field);
  if (v.is_string()) return parse_iso8601(v.get<std::string>());
  if (v.is_number_integer()) return from_unix(v.get<std::int64_t>());
  throw Error(ErrorCode::ParseError, std::string(field) + " must be an ISO-8601 string");
}

std::string str_field(const json& j, const char* field) {
  const auto& v = j.at(field);
  if (!v.is_string()) throw Error(ErrorCode::ParseError, std::string(field) + " must be a string");
  return v.get<std::string>();
}

double num_field(const json& j, const char* field) {
  const auto& v = j.at(field);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t used = 0;
      const std::string s = v.get<std::string>();
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorCode::ParseError, std::string(field) + " must be a number");
}

Outcome outcome_field(const json& j) {
  const auto& v = j.at("outcome");
  if (v.is_number_integer()) {
    const auto i = v.get<int>();
    if (i == 0 || i == 1) return i == 1 ? Outcome::Yes : Outcome::No;
  }
  if (v.is_string()) return parse_outcome(v.get<std::string>());
  throw Error(ErrorCode::ParseError, "outcome must be YES/NO or 1/0");
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
  return in;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

template <typename T, typename Parse>
std::vector<T> read_lines(const fs::path& path, std::vector<InputIssue>* issues, Parse parse) {
  auto in = open_input(path);
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      T rec = parse(json::parse(line));
      out.push_back(std::move(rec));
    } catch (const std::exception& e) {
      InputIssue issue{path.string(), lineno, e.what()};
      if (!issues) throw Error(ErrorCode::ParseError, issue.to_string());
      issues->push_back(std::move(issue));
    }
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

std::vector<Trade> read_trades_csv(const fs::path& path, std::vector<InputIssue>* issues) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  std::vector<Trade> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    if (header.empty()) {
      header = split_csv(line);
      continue;
    }
    try {
      const auto cells = split_csv(line);
      if (cells.size() != header.size()) {
        throw Error(ErrorCode::ParseError, "expected " + std::to_string(header.size()) +
                                               " columns, got " + std::to_string(cells.size()));
      }
      json j = json::object();
      for (std::size_t i = 0; i < cells.size(); ++i) j[header[i]] = cells[i];
      out.push_back(trade_from_json(j));
    } catch (const std::exception& e) {
      InputIssue issue{path.string(), lineno, e.what()};
      if (!issues) throw Error(ErrorCode::ParseError, issue.to_string());
      issues->push_back(std::move(issue));
    }
  }
  return out;
}

}  // namespace

std::string InputIssue::to_string() const {
  return file + ":" + std::to_string(line) + ": " + message;
}

MarketRecord market_from_json(const json& j) {
  MarketRecord m;
  m.market_id = str_field(j, "market_id");
  m.question = j.contains("question") ? str_field(j, "question") : std::string{};
  if (j.contains("resolution_criteria") && !j["resolution_criteria"].is_null()) {
    m.resolution_criteria = str_field(j, "resolution_criteria");
  }
  m.has_category = j.contains("category") && !j["category"].is_null();
  if (m.has_category) m.category = parse_category(str_field(j, "category"));
  m.open_ts = ts_from_json(j, "open_ts");
  m.resolve_ts = ts_from_json(j, "resolve_ts");
  if (j.contains("deadline_ts") && !j["deadline_ts"].is_null()) {
    m.deadline_ts = ts_from_json(j, "deadline_ts");
  }
  m.outcome = outcome_field(j);
  m.total_volume_usdc = j.contains("total_volume_usdc") ? num_field(j, "total_volume_usdc") : 0.0;
  m.has_resolution_type = j.contains("resolution_type") && !j["resolution_type"].is_null();
  if (m.has_resolution_type) {
    m.resolution_type = parse_resolution_type(str_field(j, "resolution_type"));
  }
  m.validate();
  return m;
}

json to_json(const MarketRecord& m) {
  json j;
  j["market_id"] = m.market_id;
  j["question"] = m.question;
  if (!m.resolution_criteria.empty()) j["resolution_criteria"] = m.resolution_criteria;
  if (m.has_category) j["category"] = to_string(m.category);
  j["open_ts"] = format_iso8601(m.open_ts);
  j["resolve_ts"] = format_iso8601(m.resolve_ts);
  if (m.deadline_ts) j["deadline_ts"] = format_iso8601(*m.deadline_ts);
  j["outcome"] = to_string(m.outcome);
  j["total_volume_usdc"] = m.total_volume_usdc;
  if (m.has_resolution_type) j["resolution_type"] = to_string(m.resolution_type);
  return j;
}

Trade trade_from_json(const json& j) {
  Trade t;
  t.ts = ts_from_json(j, "ts");
  t.market_id = str_field(j, "market_id");
  t.wallet_id = str_field(j, "wallet_id");
  t.side = parse_side(str_field(j, "side"));
  t.price = num_field(j, "price");
  t.size = num_field(j, "size");
  t.validate();
  return t;
}

json to_json(const Trade& t) {
  return json{{"ts", format_iso8601(t.ts)}, {"market_id", t.market_id},
              {"wallet_id", t.wallet_id},   {"side", to_string(t.side)},
              {"price", t.price},           {"size", t.size}};
}

NewsAnchor anchor_from_json(const json& j) {
  NewsAnchor a;
  a.market_id = str_field(j, "market_id");
  a.t_news = ts_from_json(j, "t_news");
  a.tier = parse_anchor_tier(str_field(j, "tier"));
  if (j.contains("proxy_offset_hours") && !j["proxy_offset_hours"].is_null()) {
    a.proxy_offset_hours = num_field(j, "proxy_offset_hours");
  }
  a.confidence = j.contains("confidence") ? num_field(j, "confidence") : 1.0;
  a.validate();
  return a;
}

json to_json(const NewsAnchor& a) {
  json j{{"market_id", a.market_id},
         {"t_news", format_iso8601(a.t_news)},
         {"tier", to_string(a.tier)},
         {"confidence", a.confidence}};
  if (a.proxy_offset_hours) j["proxy_offset_hours"] = *a.proxy_offset_hours;
  return j;
}

WalletProfile wallet_from_json(const json& j) {
  WalletProfile w;
  w.wallet_id = str_field(j, "wallet_id");
  w.first_tx_ts = ts_from_json(j, "first_tx_ts");
  if (j.contains("market_first_trade_ts")) {
    for (const auto& v : j.at("market_first_trade_ts")) {
      json holder{{"t", v}};
      w.market_first_trade_ts.push_back(ts_from_json(holder, "t"));
    }
  }
  if (j.contains("inflows")) {
    for (const auto& v : j.at("inflows")) {
      Inflow in;
      in.source = str_field(v, "source");
      in.amount = num_field(v, "amount");
      if (in.amount < 0.0) throw Error(ErrorCode::InvalidRecord, "negative inflow amount");
      if (v.contains("ts") && !v["ts"].is_null()) in.ts = ts_from_json(v, "ts");
      w.inflows.push_back(std::move(in));
    }
  }
  w.normalize();
  return w;
}

json to_json(const WalletProfile& w) {
  json firsts = json::array();
  for (auto t : w.market_first_trade_ts) firsts.push_back(format_iso8601(t));
  json inflows = json::array();
  for (const auto& in : w.inflows) {
    json row{{"source", in.source}, {"amount", in.amount}};
    if (in.ts) row["ts"] = format_iso8601(*in.ts);
    inflows.push_back(std::move(row));
  }
  return json{{"wallet_id", w.wallet_id},
              {"first_tx_ts", format_iso8601(w.first_tx_ts)},
              {"market_first_trade_ts", std::move(firsts)},
              {"inflows", std::move(inflows)}};
}

std::vector<MarketRecord> read_markets(const fs::path& path, std::vector<InputIssue>* issues) {
  return read_lines<MarketRecord>(path, issues, market_from_json);
}

std::vector<Trade> read_trades(const fs::path& path, std::vector<InputIssue>* issues) {
  if (path.extension() == ".csv") return read_trades_csv(path, issues);
  return read_lines<Trade>(path, issues, trade_from_json);
}

std::vector<NewsAnchor> read_anchors(const fs::path& path, std::vector<InputIssue>* issues) {
  return read_lines<NewsAnchor>(path, issues, anchor_from_json);
}

std::vector<WalletProfile> read_wallets(const fs::path& path, std::vector<InputIssue>* issues) {
  return read_lines<WalletProfile>(path, issues, wallet_from_json);
}

std::vector<json> read_jsonl(const fs::path& path) {
  return read_lines<json>(path, nullptr, [](json j) { return j; });
}

void write_jsonl(std::ostream& out, const std::vector<json>& rows) {
  for (const auto& row : rows) out << row.dump() << '\n';
}

void write_jsonl(const fs::path& path, const std::vector<json>& rows) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write '" + path.string() + "'");
  write_jsonl(out, rows);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write '" + path.string() + "'");
  out << text;
}

std::string read_text(const fs::path& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace infoflow
