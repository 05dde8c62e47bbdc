#include "infoflow/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <mutex>
#include <thread>

#include "infoflow/deadline.hpp"
#include "infoflow/error.hpp"
#include "infoflow/leakage.hpp"
#include "infoflow/scoring.hpp"

#ifndef INFOFLOW_VERSION
#define INFOFLOW_VERSION "dev"
#endif

namespace infoflow {

namespace {

struct StageError {
  std::string stage;
  ErrorCode code;
  std::string message;
};

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError{name, e.code(), e.what()};
  }
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json flags_json(const std::set<ScopeFlag>& flags) {
  json a = json::array();
  for (auto f : flags) a.push_back(to_string(f));
  return a;
}

json anchor_json(const NewsAnchor& a) {
  json j{{"t_news", format_iso8601(a.t_news)}, {"tier", to_string(a.tier)}, {"confidence", a.confidence}};
  if (a.proxy_offset_hours) j["proxy_offset_hours"] = *a.proxy_offset_hours;
  return j;
}

/// Highest confidence first, then earliest mention.
std::optional<NewsAnchor> best_anchor(std::span<const NewsAnchor> anchors,
                                      bool (*accept)(const NewsAnchor&)) {
  std::optional<NewsAnchor> best;
  for (const auto& a : anchors) {
    if (!accept(a)) continue;
    if (!best || a.confidence > best->confidence ||
        (a.confidence == best->confidence && a.t_news < best->t_news)) {
      best = a;
    }
  }
  return best;
}

bool is_reported(const NewsAnchor& a) {
  return a.tier != AnchorTier::ProxyOffset && a.tier != AnchorTier::DeadlineExpiry;
}
bool is_proxy(const NewsAnchor& a) { return a.tier == AnchorTier::ProxyOffset; }
bool is_event(const NewsAnchor& a) { return a.tier == AnchorTier::EventOccurrence; }

NewsAnchor primary_event_anchor(const MarketRecord& m, std::span<const NewsAnchor> anchors,
                                const ScopeConfig& scope) {
  if (auto a = best_anchor(anchors, is_reported)) return *a;
  if (auto a = best_anchor(anchors, is_proxy)) return *a;
  if (scope.proxy_offsets_hours.empty()) {
    throw Error(ErrorCode::InsufficientAnchors, m.market_id + ": no anchor and no proxy offset");
  }
  return proxy_anchor(m, scope.proxy_offsets_hours.front());
}

/// Own anchors, completed with in-range proxies when fewer than two.
std::vector<NewsAnchor> anchor_set(const MarketRecord& m, std::span<const NewsAnchor> anchors,
                                   const ScopeConfig& scope) {
  std::vector<NewsAnchor> out;
  for (const auto& a : anchors) {
    if (a.tier != AnchorTier::DeadlineExpiry) out.push_back(a);
  }
  if (out.size() >= 2) return out;
  for (double h : scope.proxy_offsets_hours) {
    const auto p = proxy_anchor(m, h);
    if (p.t_news < m.open_ts) continue;
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](const NewsAnchor& a) { return a.t_news == p.t_news; });
    if (!dup) out.push_back(p);
  }
  return out;
}

struct Aux {
  std::optional<double> v_pre;
  std::optional<double> jump;
  std::optional<double> hhi;
  TimeToNews gaps;
  std::size_t winning = 0;
  MeanNovelty wn;
};

Aux auxiliary(const MarketRecord& m, std::span<const Trade> trades, const PriceSeries& series,
              std::optional<Timestamp> t_news, const WalletIndex* wallets,
              const PipelineConfig& cfg) {
  Aux aux;
  const auto winners = top_winning_trades(trades, m.outcome, cfg.top_k);
  aux.winning = winners.size();
  stage("aux", [&] {
    if (t_news) {
      try {
        aux.v_pre = pre_news_volume_share(trades, *t_news, m.resolve_ts);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroVolume) throw;
      }
      aux.jump = max_pre_news_jump(series, m.open_ts, *t_news);
      aux.gaps = time_to_news_gaps(winners, *t_news);
    }
    if (!winners.empty()) aux.hhi = wallet_concentration_hhi(winners);
    return 0;
  });
  if (wallets) {
    aux.wn = stage("wallet", [&] { return mean_wallet_novelty(m, winners, *wallets, cfg.novelty); });
  }
  return aux;
}

void put_aux(json& row, const Aux& aux, bool has_wallets) {
  row["v_pre"] = opt(aux.v_pre);
  row["max_pre_news_jump"] = opt(aux.jump);
  row["hhi_top10"] = opt(aux.hhi);
  json gaps = json::array();
  for (auto g : aux.gaps.pre_news) gaps.push_back(to_hours(g));
  row["time_to_news_hours"] = gaps;
  row["post_news_winning_trades"] = aux.gaps.post_news.size();
  row["winning_trades"] = aux.winning;
  row["mean_wn"] = opt(aux.wn.mean);
  row["wallet_profiles_missing"] = has_wallets ? json(aux.wn.missing_profiles) : json(nullptr);
}

void put_label(json& row, const LabelVector& v) {
  row["label"] = {{"y_bin", v.y_bin ? json(*v.y_bin) : json(nullptr)},
                  {"partial", v.partial},
                  {"thresholds", {v.thresholds.ils, v.thresholds.v_pre, v.thresholds.mean_wn}}};
}

struct MarketOut {
  json row;
  enum class Status { Scored, Excluded, Failed } status = Status::Scored;
  std::optional<double> ils;         // in scope event-resolved value
  std::optional<double> ils_dl;
  bool ils_missing = false;
  bool structural_zero = false;
  std::set<ScopeFlag> flags;
  std::optional<bool> y;
  bool y_counted = false;
};

json base_row(const MarketRecord& m) {
  return {{"schema_version", kSchemaVersion},
          {"market_id", m.market_id},
          {"category", to_string(m.category)},
          {"resolution_type", to_string(m.resolution_type)},
          {"outcome", to_string(m.outcome)},
          {"total_volume_usdc", m.total_volume_usdc}};
}

MarketOut score_event(const MarketRecord& m, std::span<const Trade> trades,
                      std::span<const NewsAnchor> anchors, const WalletIndex* wallets,
                      const PipelineConfig& cfg) {
  MarketOut out;
  out.row = base_row(m);
  const auto series = stage("series", [&] { return build_price_series(trades); });
  const auto anchor = stage("anchor", [&] { return primary_event_anchor(m, anchors, cfg.scope); });
  auto label = stage("ils", [&] { return compute_ils(m, series, anchor, cfg.scope); });
  label.ils_windows =
      stage("ils_windows", [&] { return compute_ils_windows(m, series, anchor, cfg.scope, cfg.ils_windows); });
  const auto set = anchor_set(m, anchors, cfg.scope);
  if (set.size() >= 2) {
    label.anchors = stage("anchor_sensitivity", [&] { return anchor_sensitivity(m, series, set, cfg.scope); });
    if (!label.anchors->robust) label.scope_flags.insert(ScopeFlag::AnchorUnstable);
  }
  const auto aux = auxiliary(m, trades, series, anchor.t_news, wallets, cfg);
  label.v_pre = aux.v_pre;
  label.max_pre_news_jump = aux.jump;
  label.hhi_top10 = aux.hhi;
  label.time_to_news = aux.gaps;
  label.mean_wallet_novelty = aux.wn.mean;
  const auto vec = aggregate_label(label, cfg.thresholds);

  auto& row = out.row;
  row["status"] = "scored";
  row["kind"] = "event";
  row["anchor"] = anchor_json(anchor);
  row["ils"] = opt(label.ils);
  row["p_open"] = label.p_open;
  row["p_news"] = label.p_news;
  row["delta_pre"] = label.delta_pre;
  row["delta_total"] = label.delta_total;
  row["scope_flags"] = flags_json(label.scope_flags);
  json windows = json::object();
  for (const auto& w : label.ils_windows.windows) windows[format_duration(w.window)] = opt(w.ils);
  row["ils_windows"] = windows;
  json omitted = json::array();
  for (auto w : label.ils_windows.omitted) omitted.push_back(format_duration(w));
  row["ils_windows_omitted"] = omitted;
  if (label.anchors) {
    json per = json::array();
    for (const auto& v : label.anchors->per_anchor_ils) per.push_back(opt(v));
    json used = json::array();
    for (const auto& a : set) used.push_back(anchor_json(a));
    row["anchor_sensitivity"] = {{"robust", label.anchors->robust},
                                 {"anchors", used},
                                 {"per_anchor_ils", per},
                                 {"max_abs_difference", label.anchors->max_abs_difference}};
  } else {
    row["anchor_sensitivity"] = nullptr;
  }
  put_aux(row, aux, wallets != nullptr);
  put_label(row, vec);
  row["error"] = nullptr;

  out.flags = label.scope_flags;
  out.ils_missing = !label.ils;
  if (label.ils && !label.scope_flags.count(ScopeFlag::EdgeEffect)) out.ils = label.ils;
  out.y = vec.y_bin;
  out.y_counted = true;
  return out;
}

MarketOut score_deadline(const MarketRecord& m, std::span<const Trade> trades,
                         std::span<const NewsAnchor> anchors, const WalletIndex* wallets,
                         const PipelineConfig& cfg) {
  MarketOut out;
  out.row = base_row(m);
  const auto series = stage("series", [&] { return build_price_series(trades); });
  DeadlineLabel dl;
  if (m.outcome == Outcome::Yes) {
    const auto anchor = stage("anchor", [&] {
      if (auto a = best_anchor(anchors, is_event)) return *a;
      if (auto a = best_anchor(anchors, is_reported)) return *a;
      throw Error(ErrorCode::InsufficientAnchors, m.market_id + ": no event anchor");
    });
    dl = stage("ils_deadline", [&] { return compute_ils_deadline(m, series, anchor, cfg.scope); });
  } else {
    const auto cancel = best_anchor(anchors, is_reported);
    dl = stage("ils_deadline", [&] { return compute_ils_deadline_no(m, series, cancel, cfg.scope); });
  }
  const auto aux = auxiliary(m, trades, series, dl.t_event, wallets, cfg);

  LeakageLabel as_label;
  as_label.market_id = m.market_id;
  if (dl.ils_dl.kind == DeadlineScore::Kind::Value) as_label.ils = dl.ils_dl.value;
  if (dl.ils_dl.kind == DeadlineScore::Kind::StructuralZero) as_label.ils = 0.0;
  as_label.v_pre = aux.v_pre;
  as_label.hhi_top10 = aux.hhi;
  as_label.mean_wallet_novelty = aux.wn.mean;
  const auto vec = aggregate_label(as_label, cfg.thresholds);

  auto& row = out.row;
  row["status"] = "scored";
  row["kind"] = "deadline";
  static constexpr const char* kKinds[] = {"value", "missing", "structural_zero"};
  row["ils_dl"] = dl.ils_dl.has_value() ? json(dl.ils_dl.value) : json(nullptr);
  row["ils_dl_kind"] = kKinds[static_cast<int>(dl.ils_dl.kind)];
  row["theta_open"] = dl.theta_open;
  row["p_pre_event"] = opt(dl.p_pre_event);
  row["t_event"] = dl.t_event ? json(format_iso8601(*dl.t_event)) : json(nullptr);
  row["delta_pre"] = dl.delta_pre;
  row["delta_total"] = dl.delta_total;
  row["scope_flags"] = flags_json(dl.scope_flags);
  put_aux(row, aux, wallets != nullptr);
  put_label(row, vec);
  row["error"] = nullptr;

  out.flags = dl.scope_flags;
  out.ils_missing = dl.ils_dl.kind == DeadlineScore::Kind::Missing;
  out.structural_zero = dl.ils_dl.kind == DeadlineScore::Kind::StructuralZero;
  if (dl.ils_dl.has_value() && !dl.scope_flags.count(ScopeFlag::EdgeEffect)) out.ils_dl = dl.ils_dl.value;
  out.y = vec.y_bin;
  out.y_counted = true;
  return out;
}

MarketOut process(const MarketRecord& m, std::span<const Trade> trades,
                  std::span<const NewsAnchor> anchors, const WalletIndex* wallets,
                  const PipelineConfig& cfg, const RunOptions& opts) {
  try {
    if (m.resolution_type == ResolutionType::EventResolved) {
      return score_event(m, trades, anchors, wallets, cfg);
    }
    if (m.resolution_type == ResolutionType::DeadlineResolved) {
      return score_deadline(m, trades, anchors, wallets, cfg);
    }
    MarketOut out;
    out.row = base_row(m);
    out.row["status"] = "excluded";
    out.row["reason"] = "unclassifiable";
    out.row["error"] = nullptr;
    out.status = MarketOut::Status::Excluded;
    return out;
  } catch (const StageError& e) {
    if (!opts.skip_errors) {
      throw Error(e.code, m.market_id + " [" + e.stage + "] " + e.message);
    }
    MarketOut out;
    out.row = base_row(m);
    out.row["status"] = "error";
    out.row["error"] = {{"stage", e.stage}, {"code", to_string(e.code)}, {"message", e.message}};
    out.status = MarketOut::Status::Failed;
    return out;
  }
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (v[hi] - v[lo]) * (pos - static_cast<double>(lo));
}

json quantiles_json(const Quantiles& q) {
  if (q.n == 0) return {{"n", 0}};
  return {{"n", q.n},         {"min", q.min},   {"q25", q.q25},           {"median", q.median},
          {"q75", q.q75},     {"max", q.max},   {"mean", q.mean},         {"positive", q.positive},
          {"positive_share", static_cast<double>(q.positive) / static_cast<double>(q.n)}};
}

std::string iso_now() {
  return format_iso8601(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

}  // namespace

Quantiles summarize(std::vector<double> v) {
  Quantiles q;
  q.n = v.size();
  if (v.empty()) return q;
  std::sort(v.begin(), v.end());
  q.min = v.front();
  q.max = v.back();
  q.q25 = quantile_sorted(v, 0.25);
  q.median = quantile_sorted(v, 0.5);
  q.q75 = quantile_sorted(v, 0.75);
  double sum = 0.0;
  for (double x : v) {
    sum += x;
    if (x > 0.0) ++q.positive;
  }
  q.mean = sum / static_cast<double>(v.size());
  return q;
}

json to_json(const RunSummary& s) {
  json by_type = json::object();
  for (const auto& [t, n] : s.by_type) by_type[std::string(to_string(t))] = n;
  return {{"schema_version", kSchemaVersion},
          {"markets_read", s.markets_read},
          {"below_volume", s.below_volume},
          {"by_resolution_type", by_type},
          {"scored", s.scored},
          {"excluded", s.excluded},
          {"errors", s.errors},
          {"ils_missing", s.ils_missing},
          {"structural_zero", s.structural_zero},
          {"scope_flags", s.flags},
          {"ils", quantiles_json(s.ils)},
          {"ils_deadline", quantiles_json(s.ils_deadline)},
          {"y_bin", {{"true", s.y_true}, {"false", s.y_false}, {"null", s.y_null}}}};
}

std::string format_summary(const RunSummary& s) {
  std::ostringstream out;
  char buf[160];
  auto line = [&](const char* name, std::size_t v) {
    std::snprintf(buf, sizeof buf, "%-28s %10zu\n", name, v);
    out << buf;
  };
  line("markets read", s.markets_read);
  line("below volume cutoff", s.below_volume);
  for (const auto& [t, n] : s.by_type) {
    line(std::string(to_string(t)).c_str(), n);
  }
  line("scored", s.scored);
  line("excluded", s.excluded);
  line("errors", s.errors);
  line("ils missing", s.ils_missing);
  line("structural zero (deadline)", s.structural_zero);
  for (const auto& [f, n] : s.flags) line(("flag " + f).c_str(), n);
  out << '\n';
  std::snprintf(buf, sizeof buf, "%-14s %6s %9s %9s %9s %9s %9s %9s %9s\n", "distribution", "n",
                "min", "q25", "median", "q75", "max", "mean", "pos%");
  out << buf;
  auto dist = [&](const char* name, const Quantiles& q) {
    if (q.n == 0) {
      std::snprintf(buf, sizeof buf, "%-14s %6zu\n", name, q.n);
    } else {
      std::snprintf(buf, sizeof buf, "%-14s %6zu %9.3f %9.3f %9.3f %9.3f %9.3f %9.3f %8.1f%%\n", name,
                    q.n, q.min, q.q25, q.median, q.q75, q.max, q.mean,
                    100.0 * static_cast<double>(q.positive) / static_cast<double>(q.n));
    }
    out << buf;
  };
  dist("ils", s.ils);
  dist("ils_deadline", s.ils_deadline);
  out << '\n';
  line("y_bin true", s.y_true);
  line("y_bin false", s.y_false);
  line("y_bin null", s.y_null);
  return out.str();
}

PipelineInputs load_inputs(const PipelineConfig& cfg) {
  PipelineInputs in;
  in.markets = read_markets(cfg.paths.markets);
  in.trades = read_trades(cfg.paths.trades);
  if (cfg.paths.anchors) in.anchors = read_anchors(*cfg.paths.anchors);
  if (cfg.paths.wallets) {
    in.wallets = read_wallets(*cfg.paths.wallets);
    in.has_wallets = true;
  }
  return in;
}

PipelineReport run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg, const RuleSet& rules,
                            const RunOptions& opts) {
  cfg.validate();
  PipelineReport report;
  auto& sum = report.summary;
  sum.markets_read = in.markets.size();
  if (in.markets.empty()) report.warnings.push_back("manifest is empty; nothing to score");

  std::vector<MarketRecord> markets = volume_cutoff_filter(in.markets, cfg.volume_threshold_usdc);
  sum.below_volume = in.markets.size() - markets.size();
  for (auto& m : markets) {
    if (!m.has_resolution_type) {
      m.resolution_type = classify_resolution(m.question, m.resolution_criteria, rules);
    }
    if (!m.has_category) m.category = classify_category(m.question, rules);
    ++sum.by_type[m.resolution_type];
  }

  std::map<std::string, std::vector<Trade>, std::less<>> trades_by;
  std::set<std::string, std::less<>> known;
  for (const auto& m : markets) known.insert(m.market_id);
  std::set<std::string, std::less<>> all_ids;
  for (const auto& m : in.markets) all_ids.insert(m.market_id);
  std::size_t orphan = 0;
  for (const auto& t : in.trades) {
    if (known.count(t.market_id)) {
      trades_by[t.market_id].push_back(t);
    } else if (!all_ids.count(t.market_id)) {
      ++orphan;
    }
  }
  for (auto& [id, v] : trades_by) {
    std::stable_sort(v.begin(), v.end(), [](const Trade& a, const Trade& b) { return a.ts < b.ts; });
  }
  if (orphan) {
    report.warnings.push_back(std::to_string(orphan) + " trade(s) reference markets not in the manifest");
  }
  std::map<std::string, std::vector<NewsAnchor>, std::less<>> anchors_by;
  for (const auto& a : in.anchors) anchors_by[a.market_id].push_back(a);

  WalletIndex wallet_index;
  if (in.has_wallets) {
    for (auto w : in.wallets) {
      w.normalize();
      wallet_index[w.wallet_id] = std::move(w);
    }
  }
  const WalletIndex* wallets = in.has_wallets ? &wallet_index : nullptr;

  static const std::vector<Trade> kNoTrades;
  static const std::vector<NewsAnchor> kNoAnchors;
  std::vector<MarketOut> outs(markets.size());
  auto work = [&](std::size_t i) {
    const auto& m = markets[i];
    auto t = trades_by.find(m.market_id);
    auto a = anchors_by.find(m.market_id);
    outs[i] = process(m, t == trades_by.end() ? kNoTrades : t->second,
                      a == anchors_by.end() ? kNoAnchors : a->second, wallets, cfg, opts);
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, markets.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < markets.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < markets.size() && !failed; i = next++) {
          try {
            work(i);
          } catch (...) {
            std::lock_guard lock(err_mu);
            if (!first_error) first_error = std::current_exception();
            failed = true;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<double> ils;
  std::vector<double> ils_dl;
  for (auto& o : outs) {
    switch (o.status) {
      case MarketOut::Status::Scored: ++sum.scored; break;
      case MarketOut::Status::Excluded: ++sum.excluded; break;
      case MarketOut::Status::Failed: ++sum.errors; break;
    }
    if (o.ils_missing) ++sum.ils_missing;
    if (o.structural_zero) ++sum.structural_zero;
    for (auto f : o.flags) ++sum.flags[std::string(to_string(f))];
    if (o.ils) ils.push_back(*o.ils);
    if (o.ils_dl) ils_dl.push_back(*o.ils_dl);
    if (o.y_counted) {
      if (!o.y) {
        ++sum.y_null;
      } else if (*o.y) {
        ++sum.y_true;
      } else {
        ++sum.y_false;
      }
    }
    report.rows.push_back(std::move(o.row));
  }
  sum.ils = summarize(std::move(ils));
  sum.ils_deadline = summarize(std::move(ils_dl));
  return report;
}

void write_report(const PipelineReport& report, const PipelineConfig& cfg, const RunOptions& opts) {
  const auto& dir = cfg.output_dir;
  std::filesystem::create_directories(dir);
  std::ostringstream labels;
  write_jsonl(labels, report.rows);
  const std::string summary_json = to_json(report.summary).dump(2) + "\n";
  const std::string summary_txt = format_summary(report.summary);
  write_text(dir / "labels.jsonl", labels.str());
  write_text(dir / "summary.json", summary_json);
  write_text(dir / "summary.txt", summary_txt);

  json inputs = json::array();
  auto add_input = [&](const char* role, const std::filesystem::path& p) {
    inputs.push_back({{"role", role}, {"path", p.string()}, {"fnv1a", fnv1a_hex(read_text(p))}});
  };
  if (!cfg.paths.markets.empty()) add_input("markets", cfg.paths.markets);
  if (!cfg.paths.trades.empty()) add_input("trades", cfg.paths.trades);
  if (cfg.paths.anchors) add_input("anchors", *cfg.paths.anchors);
  if (cfg.paths.wallets) add_input("wallets", *cfg.paths.wallets);

  json manifest = {{"schema_version", kSchemaVersion},
                   {"tool", "infoflow"},
                   {"version", INFOFLOW_VERSION},
                   {"config_hash", config_hash(cfg)},
                   {"config", to_json(cfg)},
                   {"skip_errors", opts.skip_errors},
                   {"inputs", inputs},
                   {"outputs",
                    {{"labels.jsonl", fnv1a_hex(labels.str())},
                     {"summary.json", fnv1a_hex(summary_json)},
                     {"summary.txt", fnv1a_hex(summary_txt)}}},
                   {"warnings", report.warnings}};
  manifest["config"].erase("output_dir");
  manifest["manifest_hash"] = fnv1a_hex(manifest.dump());
  manifest["generated_at"] = iso_now();
  write_text(dir / "run_manifest.json", manifest.dump(2) + "\n");
}

PipelineReport run_pipeline(const PipelineConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const auto rules = cfg.rules ? RuleSet::load(*cfg.rules) : RuleSet::defaults();
  const auto inputs = load_inputs(cfg);
  auto report = run_pipeline(inputs, cfg, rules, opts);
  write_report(report, cfg, opts);
  return report;
}

json to_json(const ValidationReport& r) {
  json issues = json::array();
  for (const auto& i : r.issues) {
    issues.push_back({{"file", i.file}, {"line", i.line}, {"message", i.message}});
  }
  return {{"schema_version", kSchemaVersion},
          {"ok", r.ok()},
          {"counts", {{"markets", r.markets}, {"trades", r.trades}, {"anchors", r.anchors}, {"wallets", r.wallets}}},
          {"issues", issues}};
}

ValidationReport validate_inputs(const InputPaths& paths) {
  ValidationReport r;
  auto guarded = [&](const std::filesystem::path& p, auto read) {
    try {
      return read(p, &r.issues);
    } catch (const Error& e) {
      r.issues.push_back({p.string(), 0, e.what()});
      return decltype(read(p, &r.issues)){};
    }
  };
  const auto before = r.issues.size();
  auto markets = guarded(paths.markets, [](const auto& p, auto* i) { return read_markets(p, i); });
  r.markets = markets.size();
  // Without a readable manifest every reference would be reported as unknown.
  const bool check_refs = !(r.issues.size() > before && r.issues.back().line == 0);
  std::set<std::string, std::less<>> ids;
  for (const auto& m : markets) {
    if (!ids.insert(m.market_id).second) {
      r.issues.push_back({paths.markets.string(), 0, "duplicate market_id '" + m.market_id + "'"});
    }
  }

  // Trades are re-read line by line so referential errors carry line numbers.
  if (paths.trades.extension() == ".csv") {
    auto trades = guarded(paths.trades, [](const auto& p, auto* i) { return read_trades(p, i); });
    r.trades = trades.size();
    for (const auto& t : trades) {
      if (check_refs && !ids.count(t.market_id)) {
        r.issues.push_back({paths.trades.string(), 0, "trade references unknown market '" + t.market_id + "'"});
      }
    }
  } else {
    try {
      const auto text = read_text(paths.trades);
      std::istringstream ss(text);
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(ss, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          const auto t = trade_from_json(json::parse(line));
          ++r.trades;
          if (check_refs && !ids.count(t.market_id)) {
            r.issues.push_back({paths.trades.string(), lineno,
                                "trade references unknown market '" + t.market_id + "'"});
          }
        } catch (const std::exception& e) {
          r.issues.push_back({paths.trades.string(), lineno, e.what()});
        }
      }
    } catch (const Error& e) {
      r.issues.push_back({paths.trades.string(), 0, e.what()});
    }
  }

  if (paths.anchors) {
    auto anchors = guarded(*paths.anchors, [](const auto& p, auto* i) { return read_anchors(p, i); });
    r.anchors = anchors.size();
    std::map<std::string, const MarketRecord*, std::less<>> by_id;
    for (const auto& m : markets) by_id[m.market_id] = &m;
    for (const auto& a : anchors) {
      auto it = by_id.find(a.market_id);
      if (it == by_id.end()) {
        if (!check_refs) continue;
        r.issues.push_back({paths.anchors->string(), 0, "anchor references unknown market '" + a.market_id + "'"});
        continue;
      }
      try {
        validate_anchor_for(a, *it->second);
      } catch (const Error& e) {
        r.issues.push_back({paths.anchors->string(), 0, e.what()});
      }
    }
  }
  if (paths.wallets) {
    auto wallets = guarded(*paths.wallets, [](const auto& p, auto* i) { return read_wallets(p, i); });
    r.wallets = wallets.size();
  }
  return r;
}

}  // namespace infoflow
