#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infoflow/config.hpp"
#include "infoflow/io.hpp"
#include "infoflow/typology.hpp"

namespace infoflow {

struct PipelineInputs {
  std::vector<MarketRecord> markets;
  std::vector<Trade> trades;
  std::vector<WalletProfile> wallets;
  std::vector<NewsAnchor> anchors;
  bool has_wallets = false;
};

/// Reads the files named in cfg.paths. Throws MissingFile / ParseError.
PipelineInputs load_inputs(const PipelineConfig& cfg);

struct RunOptions {
  std::size_t jobs = 1;
  bool skip_errors = false;
};

struct Quantiles {
  std::size_t n = 0;
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::size_t positive = 0;
};

/// Linear-interpolation quantiles; n = 0 leaves the other fields zero.
Quantiles summarize(std::vector<double> values);

struct RunSummary {
  std::size_t markets_read = 0;
  std::size_t below_volume = 0;
  std::map<ResolutionType, std::size_t> by_type;
  std::size_t scored = 0;
  std::size_t excluded = 0;
  std::size_t errors = 0;
  std::size_t ils_missing = 0;
  std::size_t structural_zero = 0;
  std::map<std::string, std::size_t> flags;
  Quantiles ils;
  Quantiles ils_deadline;
  std::size_t y_true = 0;
  std::size_t y_false = 0;
  std::size_t y_null = 0;
};

nlohmann::json to_json(const RunSummary& s);
std::string format_summary(const RunSummary& s);

struct PipelineReport {
  std::vector<nlohmann::json> rows;  // one per market passing the volume filter
  RunSummary summary;
  std::vector<std::string> warnings;
};

/// Volume filter, typology, price series, ILS or ILS^dl, auxiliary metrics,
/// wallet novelty and label vector for every market. Rows keep manifest
/// order regardless of jobs. Per-market failures throw a stage-tagged Error
/// unless skip_errors is set, in which case the row carries an error object.
PipelineReport run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg,
                            const RuleSet& rules, const RunOptions& opts = {});

/// Writes labels.jsonl, summary.txt, summary.json and run_manifest.json
/// under cfg.output_dir.
void write_report(const PipelineReport& report, const PipelineConfig& cfg,
                  const RunOptions& opts);

/// load_inputs + run_pipeline + write_report.
PipelineReport run_pipeline(const PipelineConfig& cfg, const RunOptions& opts = {});

struct ValidationReport {
  std::vector<InputIssue> issues;
  std::size_t markets = 0;
  std::size_t trades = 0;
  std::size_t anchors = 0;
  std::size_t wallets = 0;
  bool ok() const { return issues.empty(); }
};

nlohmann::json to_json(const ValidationReport& r);

/// Schema, range and cross-file checks. Never throws for bad content; a
/// missing file is reported as an issue on line 0.
ValidationReport validate_inputs(const InputPaths& paths);

}  // namespace infoflow
