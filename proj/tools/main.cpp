// infoflow command-line entry point.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "infoflow/config.hpp"
#include "infoflow/deadline.hpp"
#include "infoflow/error.hpp"
#include "infoflow/io.hpp"
#include "infoflow/microstructure.hpp"
#include "infoflow/pipeline.hpp"
#include "infoflow/scoring.hpp"
#include "infoflow/synth.hpp"
#include "infoflow/typology.hpp"

namespace fs = std::filesystem;
using namespace infoflow;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool skip_errors = false;
  std::size_t jobs = 1;
};

void emit_rows(const std::vector<json>& rows, const std::string& out) {
  if (out.empty()) {
    write_jsonl(std::cout, rows);
  } else {
    write_jsonl(fs::path(out), rows);
  }
}

void emit_json(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_text(out, j.dump(2) + "\n");
  }
}

PipelineConfig base_config(const Globals& g) {
  PipelineConfig cfg = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  apply_env_overrides(cfg);
  return cfg;
}

RuleSet rules_for(const PipelineConfig& cfg, const std::string& override_path) {
  if (!override_path.empty()) return RuleSet::load(override_path);
  return cfg.rules ? RuleSet::load(*cfg.rules) : RuleSet::defaults();
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json micro_json(const std::string& market_id, const MicroFeatures& f, std::size_t vr_k) {
  json oi = json::object();
  for (const auto& [w, v] : f.oi) oi[format_duration(w)] = opt(v);
  return {{"schema_version", kSchemaVersion},
          {"market_id", market_id},
          {"at", format_iso8601(f.at)},
          {"oi", oi},
          {"vpin", opt(f.vpin)},
          {"kyle_lambda", opt(f.kyle_lambda)},
          {"vr_k", vr_k},
          {"vr", opt(f.vr)},
          {"vr_clipped", f.vr_clipped},
          {"ts", opt(f.ts)},
          {"size_kurtosis", opt(f.size_kurtosis)},
          {"hawkes_branching", opt(f.hawkes_branching)}};
}

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "expected a number, got '" + cell + "'");
    }
  }
  return out;
}

int outcome_int(const json& v) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  return parse_outcome(v.get<std::string>()) == Outcome::Yes ? 1 : 0;
}

PipelineReport pipeline_subset(const Globals& g, const std::string& markets, const std::string& trades,
                               const std::string& anchors, const std::string& wallets) {
  auto cfg = base_config(g);
  if (!markets.empty()) cfg.paths.markets = markets;
  if (!trades.empty()) cfg.paths.trades = trades;
  if (!anchors.empty()) cfg.paths.anchors = anchors;
  if (!wallets.empty()) cfg.paths.wallets = wallets;
  const auto inputs = load_inputs(cfg);
  return run_pipeline(inputs, cfg, rules_for(cfg, ""), {g.jobs, g.skip_errors});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"infoflow: informed-flow labels and features for binary prediction markets"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Pipeline configuration (JSON)");
  app.add_option("--out", g.out, "Output file (or directory for run)");
  app.add_option("--seed", g.seed, "Seed override for synth");
  app.add_flag("--skip-errors", g.skip_errors, "Record per-market failures instead of aborting");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);

  // classify
  auto* classify = app.add_subcommand("classify", "Resolution typology and category per market");
  std::string c_markets, c_rules, c_report;
  classify->add_option("--markets", c_markets)->required();
  classify->add_option("--rules", c_rules, "Rule set JSON (default: built-in v1)");
  classify->add_option("--report", c_report, "Write the typology report JSON here");

  // ils
  auto* ils = app.add_subcommand("ils", "Event-resolved ILS with scope flags");
  std::string i_markets, i_trades, i_anchors, i_wallets;
  ils->add_option("--markets", i_markets);
  ils->add_option("--trades", i_trades);
  ils->add_option("--anchors", i_anchors);
  ils->add_option("--wallets", i_wallets);

  // ils-deadline
  auto* ilsd = app.add_subcommand("ils-deadline", "Deadline ILS for deadline-resolved markets");
  std::string d_markets, d_trades, d_events, d_hazard, d_wallets;
  ilsd->add_option("--markets", d_markets);
  ilsd->add_option("--trades", d_trades);
  ilsd->add_option("--events", d_events, "Anchor file with event_occurrence anchors");
  ilsd->add_option("--hazard", d_hazard, "HazardFit JSON; adds the passive baseline at T_event");
  ilsd->add_option("--wallets", d_wallets);

  // hazard-fit
  auto* hazard = app.add_subcommand("hazard-fit", "Exponential hazard MLE per category");
  std::string h_markets, h_events, h_category;
  bool h_censored = false;
  hazard->add_option("--markets", h_markets)->required();
  hazard->add_option("--events", h_events)->required();
  hazard->add_option("--category", h_category, "Restrict to one category");
  hazard->add_flag("--censored", h_censored, "Include NO-resolved exposure as censored");

  // micro
  auto* micro = app.add_subcommand("micro", "Microstructure features for one market");
  std::string m_trades, m_market, m_at = "stream", m_windows, m_category = "other";
  micro->add_option("--trades", m_trades)->required();
  micro->add_option("--market", m_market)->required();
  micro->add_option("--at", m_at, "ISO timestamp or 'stream'");
  micro->add_option("--windows", m_windows, "Config file with a windows section");
  micro->add_option("--category", m_category);

  // wallet-novelty
  auto* wallet = app.add_subcommand("wallet-novelty", "Mean wallet novelty of top winning trades");
  std::string w_wallets, w_trades, w_markets;
  wallet->add_option("--wallets", w_wallets)->required();
  wallet->add_option("--trades", w_trades)->required();
  wallet->add_option("--markets", w_markets)->required();

  // murphy
  auto* murphy = app.add_subcommand("murphy", "Brier decomposition of forecast/outcome pairs");
  std::string u_pairs;
  std::size_t u_bins = 10;
  bool u_raw = false;
  murphy->add_option("--pairs", u_pairs, "JSONL rows {forecast, outcome}")->required();
  murphy->add_option("--bins", u_bins)->check(CLI::PositiveNumber);
  murphy->add_flag("--raw", u_raw, "Also report the raw-forecast variant");

  // label
  auto* label = app.add_subcommand("label", "Binary labels from leakage rows");
  std::string l_leakage, l_thresholds;
  label->add_option("--leakage", l_leakage)->required();
  label->add_option("--thresholds", l_thresholds, "t1,t2,t3");

  // power
  auto* power = app.add_subcommand("power", "Required number of positives");
  double p_pi1 = 0.7, p_pi0 = 0.2, p_kappa = 0.05, p_power = 0.8;
  PowerVariant p_variant;
  power->add_option("--pi1", p_pi1);
  power->add_option("--pi0", p_pi0);
  power->add_option("--kappa", p_kappa);
  power->add_option("--power", p_power);
  power->add_flag("--two-sided", p_variant.two_sided);
  power->add_flag("--two-variance", p_variant.two_variance);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic bundle");
  std::string s_spec, s_out_dir, s_regime;
  std::optional<std::size_t> s_n;
  std::optional<double> s_f;
  synth->add_option("--spec", s_spec, "ScenarioSpec JSON");
  synth->add_option("--out-dir", s_out_dir)->required();
  synth->add_option("--regime", s_regime, "null | event_leak | deadline_leak");
  synth->add_option("--n-markets", s_n);
  synth->add_option("--leak-fraction", s_f);

  // run
  auto* run = app.add_subcommand("run", "Batch pipeline from a config file");

  // validate
  auto* validate = app.add_subcommand("validate", "Schema and cross-file checks");
  std::string v_markets, v_trades, v_anchors, v_wallets;
  validate->add_option("--markets", v_markets);
  validate->add_option("--trades", v_trades);
  validate->add_option("--anchors", v_anchors);
  validate->add_option("--wallets", v_wallets);

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) {
      const auto cfg = base_config(g);
      const auto rules = rules_for(cfg, c_rules);
      auto markets = read_markets(c_markets);
      std::vector<json> rows;
      for (auto& m : markets) {
        const auto type = classify_resolution(m.question, m.resolution_criteria, rules);
        const auto cat = classify_category(m.question, rules);
        json row{{"schema_version", kSchemaVersion},
                 {"market_id", m.market_id},
                 {"resolution_type", to_string(type)},
                 {"category", to_string(cat)},
                 {"rules_version", rules.version()}};
        if (m.has_resolution_type) row["given_resolution_type"] = to_string(m.resolution_type);
        if (m.has_category) row["given_category"] = to_string(m.category);
        rows.push_back(std::move(row));
        m.resolution_type = type;
        m.category = cat;
      }
      emit_rows(rows, g.out);
      const auto report = typology_report(markets);
      std::cerr << format_table(report);
      if (!c_report.empty()) write_text(c_report, to_json(report).dump(2) + "\n");
      return 0;
    }

    if (ils->parsed() || ilsd->parsed()) {
      const bool event = ils->parsed();
      const auto report = event ? pipeline_subset(g, i_markets, i_trades, i_anchors, i_wallets)
                                : pipeline_subset(g, d_markets, d_trades, d_events, d_wallets);
      std::optional<HazardFit> fit;
      if (!event && !d_hazard.empty()) {
        const auto j = json::parse(read_text(d_hazard));
        HazardFit h;
        h.lambda = j.at("lambda").get<double>();
        fit = h;
      }
      std::map<std::string, MarketRecord, std::less<>> by_id;
      if (fit) {
        auto cfg = base_config(g);
        for (auto& m : read_markets(d_markets.empty() ? cfg.paths.markets : fs::path(d_markets))) {
          by_id[m.market_id] = m;
        }
      }
      std::vector<json> rows;
      for (const auto& row : report.rows) {
        const auto kind = row.value("kind", std::string());
        const bool wanted = event ? kind == "event" : kind == "deadline";
        const bool failed = row.value("status", std::string()) == "error";
        if (!wanted && !failed) continue;
        if (failed) {
          const auto type = row.value("resolution_type", std::string());
          if ((event && type != "event_resolved") || (!event && type != "deadline_resolved")) continue;
        }
        json out = row;
        if (fit && !row["t_event"].is_null()) {
          const auto& m = by_id.at(row["market_id"].get<std::string>());
          const auto t_event = parse_iso8601(row["t_event"].get<std::string>());
          if (m.deadline_ts && t_event <= *m.deadline_ts) {
            out["theta_baseline_at_event"] = theta_baseline(row["theta_open"].get<double>(), fit->lambda,
                                                            t_event, m.open_ts, *m.deadline_ts);
          }
        }
        rows.push_back(std::move(out));
      }
      emit_rows(rows, g.out);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      return 0;
    }

    if (hazard->parsed()) {
      const auto markets = read_markets(h_markets);
      const auto anchors = read_anchors(h_events);
      std::map<std::string, Timestamp, std::less<>> event_at;
      for (const auto& a : anchors) {
        if (a.tier != AnchorTier::EventOccurrence) continue;
        auto [it, inserted] = event_at.emplace(a.market_id, a.t_news);
        if (!inserted && a.t_news < it->second) it->second = a.t_news;
      }
      std::map<Category, std::pair<std::vector<Exposure>, std::vector<Exposure>>> by_cat;
      for (const auto& m : markets) {
        if (m.resolution_type != ResolutionType::DeadlineResolved) continue;
        if (!h_category.empty() && m.category != parse_category(h_category)) continue;
        auto& [events, censored] = by_cat[m.category];
        if (m.outcome == Outcome::Yes) {
          auto it = event_at.find(m.market_id);
          if (it != event_at.end()) events.push_back({m.open_ts, it->second});
        } else if (h_censored && m.deadline_ts) {
          censored.push_back({m.open_ts, *m.deadline_ts});
        }
      }
      std::vector<json> fits;
      for (const auto& [cat, ex] : by_cat) {
        if (ex.first.empty()) {
          std::cerr << "warning: no events for category " << to_string(cat) << '\n';
          continue;
        }
        const auto f = fit_hazard(cat, ex.first, ex.second);
        fits.push_back({{"schema_version", kSchemaVersion},
                        {"category", to_string(f.category)},
                        {"lambda", f.lambda},
                        {"n_events", f.n_events},
                        {"n_censored", f.n_censored},
                        {"total_exposure_days", f.total_exposure_days},
                        {"ci95", {f.ci95_lo, f.ci95_hi}}});
      }
      if (fits.empty()) throw Error(ErrorCode::NoEvents, "no category has an observed event");
      emit_json(fits.size() == 1 ? fits.front() : json(fits), g.out);
      return 0;
    }

    if (micro->parsed()) {
      WindowSpec spec;
      if (!m_windows.empty()) {
        const auto j = json::parse(read_text(m_windows));
        spec = config_from_json(j.contains("windows") ? j : json{{"windows", j}}).windows;
      } else if (!g.config.empty()) {
        spec = base_config(g).windows;
      }
      const auto category = parse_category(m_category);
      std::vector<Trade> trades;
      for (auto& t : read_trades(m_trades)) {
        if (t.market_id == m_market) trades.push_back(std::move(t));
      }
      if (trades.empty()) throw Error(ErrorCode::NoTrades, "no trades for market " + m_market);
      std::stable_sort(trades.begin(), trades.end(),
                       [](const Trade& a, const Trade& b) { return a.ts < b.ts; });
      if (!spec.bucket_volume_for(category)) {
        double tokens = 0.0;
        for (const auto& t : trades) tokens += t.size;
        const double days = std::max(to_days(trades.back().ts - trades.front().ts), 1.0);
        spec.vpin_bucket_volume = tokens / days / 50.0;
      }
      MicroEngine engine(spec, category);
      std::vector<json> rows;
      if (m_at == "stream") {
        for (const auto& f : engine.stream(trades)) rows.push_back(micro_json(m_market, f, spec.vr_k));
      } else {
        for (const auto& t : trades) engine.push(t);
        rows.push_back(micro_json(m_market, engine.evaluate(parse_iso8601(m_at)), spec.vr_k));
      }
      emit_rows(rows, g.out);
      return 0;
    }

    if (wallet->parsed()) {
      const auto cfg = base_config(g);
      WalletIndex index;
      for (auto w : read_wallets(w_wallets)) {
        w.normalize();
        index[w.wallet_id] = std::move(w);
      }
      std::map<std::string, std::vector<Trade>, std::less<>> by_market;
      for (auto& t : read_trades(w_trades)) by_market[t.market_id].push_back(std::move(t));
      std::vector<json> rows;
      for (const auto& m : read_markets(w_markets)) {
        const auto& trades = by_market[m.market_id];
        const auto winners = top_winning_trades(trades, m.outcome, cfg.top_k);
        json row{{"schema_version", kSchemaVersion}, {"market_id", m.market_id}};
        try {
          const auto mean = mean_wallet_novelty(m, winners, index, cfg.novelty);
          json per = json::array();
          for (std::size_t i = 0; i < winners.size(); ++i) {
            per.push_back({{"wallet_id", winners[i].wallet_id},
                           {"ts", format_iso8601(winners[i].ts)},
                           {"size", winners[i].size},
                           {"wn", opt(mean.per_trade[i])}});
          }
          row["mean_wn"] = opt(mean.mean);
          row["scored"] = mean.scored;
          row["missing_profiles"] = mean.missing_profiles;
          row["trades"] = per;
          row["error"] = nullptr;
        } catch (const Error& e) {
          if (!g.skip_errors) throw;
          row["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
        }
        rows.push_back(std::move(row));
      }
      emit_rows(rows, g.out);
      return 0;
    }

    if (murphy->parsed()) {
      std::vector<ForecastPair> pairs;
      for (const auto& j : read_jsonl(u_pairs)) {
        pairs.push_back({j.at("forecast").get<double>(), outcome_int(j.at("outcome"))});
      }
      const auto m = murphy_decompose(pairs, u_bins, u_raw);
      json j{{"schema_version", kSchemaVersion}, {"brier", m.brier}, {"unc", m.unc}, {"rel", m.rel},
             {"res", m.res},  {"n", m.n},       {"bins", m.bins}};
      if (u_raw) {
        j["brier_raw"] = *m.brier_raw;
        j["within_bin_variance"] = *m.within_bin_variance;
        j["within_bin_covariance"] = *m.within_bin_covariance;
      }
      emit_json(j, g.out);
      return 0;
    }

    if (label->parsed()) {
      Thresholds th = g.config.empty() ? Thresholds{} : base_config(g).thresholds;
      if (!l_thresholds.empty()) {
        const auto v = parse_csv_doubles(l_thresholds);
        if (v.size() != 3) throw Error(ErrorCode::ConfigError, "--thresholds needs three values");
        th = {v[0], v[1], v[2]};
      }
      auto num = [](const json& j, const char* key) -> std::optional<double> {
        if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
        return j.at(key).get<double>();
      };
      std::vector<json> rows;
      for (const auto& j : read_jsonl(l_leakage)) {
        LeakageLabel l;
        l.market_id = j.value("market_id", std::string());
        l.ils = j.contains("ils") ? num(j, "ils") : num(j, "ils_dl");
        if (!l.ils && j.value("ils_dl_kind", std::string()) == "structural_zero") l.ils = 0.0;
        if (j.contains("ils_windows") && j.at("ils_windows").is_object()) {
          for (const auto& [k, v] : j.at("ils_windows").items()) {
            l.ils_windows.windows.push_back(
                {parse_duration(k), v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()), 0.0, false});
          }
        }
        l.v_pre = num(j, "v_pre");
        l.hhi_top10 = num(j, "hhi_top10");
        l.mean_wallet_novelty = num(j, "mean_wn");
        const auto v = aggregate_label(l, th);
        rows.push_back({{"schema_version", kSchemaVersion},
                        {"market_id", v.market_id},
                        {"ils", opt(v.ils)},
                        {"ils_30min", opt(v.ils_30min)},
                        {"ils_2h", opt(v.ils_2h)},
                        {"v_pre", opt(v.v_pre)},
                        {"hhi_top10", opt(v.hhi_top10)},
                        {"mean_wn", opt(v.mean_wn)},
                        {"y_bin", v.y_bin ? json(*v.y_bin) : json(nullptr)},
                        {"partial", v.partial},
                        {"thresholds", {th.ils, th.v_pre, th.mean_wn}}});
      }
      emit_rows(rows, g.out);
      return 0;
    }

    if (power->parsed()) {
      const auto r = required_positives(p_pi1, p_pi0, p_kappa, p_power, p_variant);
      emit_json({{"schema_version", kSchemaVersion},
                 {"n", r.n},
                 {"n_exact", r.n_exact},
                 {"z_alpha", r.z_alpha},
                 {"z_power", r.z_power},
                 {"pi1", p_pi1},
                 {"pi0", p_pi0},
                 {"kappa", p_kappa},
                 {"power", p_power},
                 {"two_sided", p_variant.two_sided},
                 {"two_variance", p_variant.two_variance}},
                g.out);
      return 0;
    }

    if (synth->parsed()) {
      ScenarioSpec spec = s_spec.empty() ? ScenarioSpec{} : scenario_from_json(json::parse(read_text(s_spec)));
      if (!s_regime.empty()) spec.regime = parse_regime(s_regime);
      if (s_n) spec.n_markets = *s_n;
      if (s_f) spec.leak_fraction = *s_f;
      if (g.seed) spec.seed = *g.seed;
      const auto bundle = gen_population(spec);
      write_bundle(bundle, spec, s_out_dir);
      std::cerr << "wrote " << bundle.markets.size() << " markets, " << bundle.trades.size()
                << " trades to " << s_out_dir << '\n';
      return 0;
    }

    if (run->parsed()) {
      if (g.config.empty()) throw Error(ErrorCode::ConfigError, "run requires --config");
      auto cfg = base_config(g);
      if (!g.out.empty()) cfg.output_dir = g.out;
      const auto report = run_pipeline(cfg, {g.jobs, g.skip_errors});
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << format_summary(report.summary);
      return 0;
    }

    if (validate->parsed()) {
      InputPaths paths;
      if (!g.config.empty()) paths = base_config(g).paths;
      if (!v_markets.empty()) paths.markets = v_markets;
      if (!v_trades.empty()) paths.trades = v_trades;
      if (!v_anchors.empty()) paths.anchors = v_anchors;
      if (!v_wallets.empty()) paths.wallets = v_wallets;
      const auto report = validate_inputs(paths);
      emit_json(to_json(report), g.out);
      for (const auto& i : report.issues) std::cerr << i.to_string() << '\n';
      return report.ok() ? 0 : 2;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
