#pragma once

#include <filesystem>
#include <map>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "infoflow/market.hpp"

namespace infoflow {

struct EventPattern {
  std::string pattern;
  bool overrides_deadline = false;
};

/// Keyword heuristics for resolution typology and categories. Construct via
/// from_json / load / defaults; patterns are compiled once.
class RuleSet {
 public:
  static RuleSet defaults();  // the compiled-in v1 rules
  static RuleSet from_json(const nlohmann::json& j);
  static RuleSet load(const std::filesystem::path& path);

  const std::string& version() const { return version_; }
  const std::vector<std::string>& deadline_patterns() const { return deadline_patterns_; }
  const std::vector<EventPattern>& event_patterns() const { return event_patterns_; }
  const std::map<Category, std::vector<std::string>>& category_keywords() const {
    return category_keywords_;
  }

  bool matches_deadline(const std::string& normalized) const;
  /// 0 = no event match, 1 = non-overriding match, 2 = overriding match.
  int event_match_strength(const std::string& normalized) const;
  std::size_t keyword_votes(Category c, const std::string& normalized) const;

 private:
  std::string version_;
  std::vector<std::string> deadline_patterns_;
  std::vector<EventPattern> event_patterns_;
  std::map<Category, std::vector<std::string>> category_keywords_;

  std::vector<std::regex> deadline_re_;
  std::vector<std::regex> event_re_;
  std::map<Category, std::vector<std::regex>> keyword_re_;
};

/// Lowercases and collapses runs of whitespace to one space.
std::string normalize_text(std::string_view text);

/// Overriding event patterns win over deadline patterns; otherwise a deadline
/// match gives deadline_resolved, any event match gives event_resolved and
/// the default is unclassifiable.
ResolutionType classify_resolution(std::string_view question, std::string_view resolution_criteria,
                                   const RuleSet& rules);

/// Keyword vote; ties broken military > regulatory > corporate > other.
Category classify_category(std::string_view question, const RuleSet& rules);

struct TypologyRow {
  ResolutionType type = ResolutionType::Unclassifiable;
  std::size_t n = 0;
  double share = 0.0;
  std::size_t yes = 0;
  double yes_rate = 0.0;
};

struct TypologyReport {
  std::vector<TypologyRow> rows;  // event, deadline, unclassifiable
  std::size_t total = 0;
  /// Deadline-resolved markets that resolved YES: surfaced for manual review.
  std::vector<std::string> review_deadline_yes;
};

TypologyReport typology_report(std::span<const MarketRecord> markets);

nlohmann::json to_json(const TypologyReport& report);
std::string format_table(const TypologyReport& report);

/// Post-hoc surprise flag: every minute VWAP sat on the losing side of 0.5 by
/// more than 0.5 - consensus_band (e.g. always >= 0.9 and the market resolved NO).
bool surprise_resolved(const PriceSeries& series, Outcome outcome, double consensus_band = 0.1);

}  // namespace infoflow
