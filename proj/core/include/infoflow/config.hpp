#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infoflow/leakage.hpp"
#include "infoflow/microstructure.hpp"
#include "infoflow/scoring.hpp"
#include "infoflow/wallet.hpp"

namespace infoflow {

struct InputPaths {
  std::filesystem::path markets;
  std::filesystem::path trades;
  std::optional<std::filesystem::path> wallets;
  std::optional<std::filesystem::path> anchors;
};

/// Batch run configuration. Stored as one JSON document with a section per
/// module; load -> save -> load is the identity.
struct PipelineConfig {
  InputPaths paths;
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> rules;  // empty = built-in rule set
  ScopeConfig scope;
  WindowSpec windows;
  NoveltyConfig novelty;
  Thresholds thresholds;
  std::vector<Seconds> ils_windows = default_ils_windows();
  double volume_threshold_usdc = 50000.0;
  std::size_t top_k = 10;

  void validate() const;
};

nlohmann::json to_json(const PipelineConfig& c);

/// Missing sections keep their defaults. Throws ConfigError.
PipelineConfig config_from_json(const nlohmann::json& j);

PipelineConfig load_config(const std::filesystem::path& path);
void save_config(const PipelineConfig& c, const std::filesystem::path& path);

/// Applies IFLOW_MARKETS, IFLOW_TRADES, IFLOW_WALLETS, IFLOW_ANCHORS and
/// IFLOW_OUT_DIR. Numeric parameters are never read from the environment.
void apply_env_overrides(PipelineConfig& c);

/// FNV-1a of the compact JSON dump, output_dir excluded.
std::string config_hash(const PipelineConfig& c);

}  // namespace infoflow
