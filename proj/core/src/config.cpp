#include "infoflow/config.hpp"

#include <cstdlib>

#include "infoflow/error.hpp"
#include "infoflow/io.hpp"

namespace infoflow {

namespace {

json durations(const std::vector<Seconds>& v) {
  json a = json::array();
  for (auto d : v) a.push_back(format_duration(d));
  return a;
}

std::vector<Seconds> durations_from(const json& a) {
  std::vector<Seconds> out;
  for (const auto& d : a) out.push_back(d.is_number() ? Seconds{d.get<std::int64_t>()}
                                                      : parse_duration(d.get<std::string>()));
  return out;
}

Seconds duration_field(const json& j, const char* key, Seconds fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  return v.is_number() ? Seconds{v.get<std::int64_t>()} : parse_duration(v.get<std::string>());
}

json optional_path(const std::optional<std::filesystem::path>& p) {
  return p ? json(p->string()) : json(nullptr);
}

std::optional<std::filesystem::path> optional_path_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return std::filesystem::path(j.at(key).get<std::string>());
}

}  // namespace

void PipelineConfig::validate() const {
  scope.validate();
  windows.validate();
  novelty.validate();
  if (ils_windows.empty()) throw Error(ErrorCode::ConfigError, "ils_windows is empty");
  for (auto w : ils_windows) {
    if (w.count() <= 0) throw Error(ErrorCode::ConfigError, "ils windows must be positive");
  }
  if (!(volume_threshold_usdc >= 0.0)) {
    throw Error(ErrorCode::ConfigError, "volume_threshold_usdc must be >= 0");
  }
  if (top_k == 0) throw Error(ErrorCode::ConfigError, "top_k must be positive");
}

json to_json(const PipelineConfig& c) {
  json by_cat = json::object();
  for (const auto& [cat, v] : c.windows.vpin_bucket_by_category) by_cat[std::string(to_string(cat))] = v;
  const auto& w = c.windows;
  return {
      {"schema_version", kSchemaVersion},
      {"paths",
       {{"markets", c.paths.markets.string()},
        {"trades", c.paths.trades.string()},
        {"wallets", optional_path(c.paths.wallets)},
        {"anchors", optional_path(c.paths.anchors)}}},
      {"output_dir", c.output_dir.string()},
      {"rules", optional_path(c.rules)},
      {"scope",
       {{"epsilon", c.scope.epsilon},
        {"edge_band", c.scope.edge_band},
        {"anchor_robustness_max_delta", c.scope.anchor_robustness_max_delta},
        {"proxy_offsets_hours", c.scope.proxy_offsets_hours}}},
      {"windows",
       {{"oi_windows", durations(w.oi_windows)},
        {"vpin_bucket_volume", w.vpin_bucket_volume ? json(*w.vpin_bucket_volume) : json(nullptr)},
        {"vpin_bucket_by_category", by_cat},
        {"vpin_trailing_buckets", w.vpin_trailing_buckets},
        {"lambda_window", w.lambda_window},
        {"vr_k", w.vr_k},
        {"vr_delta", format_duration(w.vr_delta)},
        {"ts_window", format_duration(w.ts_window)},
        {"kurtosis_window", format_duration(w.kurtosis_window)},
        {"hawkes_window", format_duration(w.hawkes_window)},
        {"hawkes", w.hawkes}}},
      {"novelty",
       {{"alphas", c.novelty.alphas},
        {"normalize", c.novelty.normalize},
        {"age_threshold", format_duration(c.novelty.age_threshold)},
        {"prior_markets_threshold", c.novelty.prior_markets_threshold},
        {"late_entry_window", format_duration(c.novelty.late_entry_window)}}},
      {"thresholds",
       {{"ils", c.thresholds.ils}, {"v_pre", c.thresholds.v_pre}, {"mean_wn", c.thresholds.mean_wn}}},
      {"ils_windows", durations(c.ils_windows)},
      {"volume_threshold_usdc", c.volume_threshold_usdc},
      {"top_k", c.top_k},
  };
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  try {
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      c.paths.markets = p.value("markets", std::string());
      c.paths.trades = p.value("trades", std::string());
      c.paths.wallets = optional_path_from(p, "wallets");
      c.paths.anchors = optional_path_from(p, "anchors");
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    c.rules = optional_path_from(j, "rules");
    if (j.contains("scope")) {
      const auto& s = j.at("scope");
      c.scope.epsilon = s.value("epsilon", c.scope.epsilon);
      c.scope.edge_band = s.value("edge_band", c.scope.edge_band);
      c.scope.anchor_robustness_max_delta =
          s.value("anchor_robustness_max_delta", c.scope.anchor_robustness_max_delta);
      if (s.contains("proxy_offsets_hours")) {
        c.scope.proxy_offsets_hours = s.at("proxy_offsets_hours").get<std::vector<double>>();
      }
    }
    if (j.contains("windows")) {
      const auto& w = j.at("windows");
      auto& o = c.windows;
      if (w.contains("oi_windows")) o.oi_windows = durations_from(w.at("oi_windows"));
      if (w.contains("vpin_bucket_volume") && !w.at("vpin_bucket_volume").is_null()) {
        o.vpin_bucket_volume = w.at("vpin_bucket_volume").get<double>();
      }
      if (w.contains("vpin_bucket_by_category")) {
        for (const auto& [name, v] : w.at("vpin_bucket_by_category").items()) {
          o.vpin_bucket_by_category[parse_category(name)] = v.get<double>();
        }
      }
      o.vpin_trailing_buckets = w.value("vpin_trailing_buckets", o.vpin_trailing_buckets);
      o.lambda_window = w.value("lambda_window", o.lambda_window);
      o.vr_k = w.value("vr_k", o.vr_k);
      o.vr_delta = duration_field(w, "vr_delta", o.vr_delta);
      o.ts_window = duration_field(w, "ts_window", o.ts_window);
      o.kurtosis_window = duration_field(w, "kurtosis_window", o.kurtosis_window);
      o.hawkes_window = duration_field(w, "hawkes_window", o.hawkes_window);
      o.hawkes = w.value("hawkes", o.hawkes);
    }
    if (j.contains("novelty")) {
      const auto& n = j.at("novelty");
      if (n.contains("alphas")) c.novelty.alphas = n.at("alphas").get<std::array<double, 4>>();
      c.novelty.normalize = n.value("normalize", c.novelty.normalize);
      c.novelty.age_threshold = duration_field(n, "age_threshold", c.novelty.age_threshold);
      c.novelty.prior_markets_threshold =
          n.value("prior_markets_threshold", c.novelty.prior_markets_threshold);
      c.novelty.late_entry_window = duration_field(n, "late_entry_window", c.novelty.late_entry_window);
    }
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      c.thresholds.ils = t.value("ils", c.thresholds.ils);
      c.thresholds.v_pre = t.value("v_pre", c.thresholds.v_pre);
      c.thresholds.mean_wn = t.value("mean_wn", c.thresholds.mean_wn);
    }
    if (j.contains("ils_windows")) c.ils_windows = durations_from(j.at("ils_windows"));
    c.volume_threshold_usdc = j.value("volume_threshold_usdc", c.volume_threshold_usdc);
    c.top_k = j.value("top_k", c.top_k);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const PipelineConfig& c, const std::filesystem::path& path) {
  write_text(path, to_json(c).dump(2) + "\n");
}

void apply_env_overrides(PipelineConfig& c) {
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("IFLOW_MARKETS")) c.paths.markets = *v;
  if (auto v = env("IFLOW_TRADES")) c.paths.trades = *v;
  if (auto v = env("IFLOW_WALLETS")) c.paths.wallets = *v;
  if (auto v = env("IFLOW_ANCHORS")) c.paths.anchors = *v;
  if (auto v = env("IFLOW_OUT_DIR")) c.output_dir = *v;
}

std::string config_hash(const PipelineConfig& c) {
  auto j = to_json(c);
  j.erase("output_dir");
  return fnv1a_hex(j.dump());
}

}  // namespace infoflow
